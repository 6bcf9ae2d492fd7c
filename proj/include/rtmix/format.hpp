#pragma once

#include <string>
#include <vector>

namespace rtmix {

// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite.
std::string format_double(double value);

// Fixed-point with the given number of decimals.
std::string format_fixed(double value, int decimals);

// Sample quantile with linear interpolation between order statistics
// (R type 7). `sorted` must be ascending and nonempty.
double quantile_sorted(const std::vector<double>& sorted, double p);

double quantile(std::vector<double> values, double p);

double mean(const std::vector<double>& values);

// Unbiased sample variance (n - 1 divisor); 0 for fewer than two values.
double sample_variance(const std::vector<double>& values);

}  // namespace rtmix
