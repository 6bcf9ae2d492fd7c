#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rtmix/data.hpp"
#include "rtmix/model.hpp"
#include "rtmix/simulate.hpp"

namespace rtmix::test {

// Extended-precision references used as oracles. They share no code with the
// library.
inline long double ld_lognormal(long double y, long double mu,
                                long double sigma) {
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double z = (std::log(y) - mu) / sigma;
  return -std::log(y) - std::log(sigma) - 0.5L * std::log(2.0L * pi) -
         0.5L * z * z;
}

inline long double ld_normal(long double x, long double mu, long double sigma) {
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double z = (x - mu) / sigma;
  return -std::log(sigma) - 0.5L * std::log(2.0L * pi) - 0.5L * z * z;
}

inline long double ld_cauchy(long double x, long double scale) {
  const long double pi = 3.141592653589793238462643383279502884L;
  return -std::log(pi * scale * (1.0L + (x / scale) * (x / scale)));
}

inline long double ld_half_cauchy(long double x, long double scale) {
  return std::log(2.0L) + ld_cauchy(x, scale);
}

// Direct log of the mean of exponentials, no shifting. long double covers
// exp(+-11000), so inputs of magnitude 700 are exact enough.
inline long double ld_log_mean_exp(std::span<const double> v) {
  long double s = 0.0L;
  for (double x : v) s += std::exp(static_cast<long double>(x));
  return std::log(s / static_cast<long double>(v.size()));
}

inline long double ld_mixture(long double y, long double p, long double beta,
                              long double delta, long double sigma_e,
                              long double sigma_ep, long double shift) {
  const long double fail = std::exp(ld_lognormal(y, beta + delta + shift, sigma_ep));
  const long double ok = std::exp(ld_lognormal(y, beta + shift, sigma_e));
  return std::log(p * fail + (1.0L - p) * ok);
}

inline double rel_err(double a, double b) {
  if (a == b) return 0.0;
  return std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b));
}

// Small fully crossed dataset: participant i, item j, SR when (i + j) even.
inline Dataset grid_dataset(std::size_t n_participants, std::size_t n_items,
                            std::uint64_t seed, double center = 6.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.4);
  std::vector<Trial> trials;
  for (std::size_t i = 0; i < n_participants; ++i)
    for (std::size_t j = 0; j < n_items; ++j) {
      const auto c = (i + j) % 2 == 0 ? Condition::SubjectRelative
                                      : Condition::ObjectRelative;
      trials.push_back({i, j, c, std::exp(center + noise(rng))});
    }
  std::vector<std::string> p, it;
  for (std::size_t i = 0; i < n_participants; ++i) p.push_back(std::to_string(i + 1));
  for (std::size_t j = 0; j < n_items; ++j) it.push_back(std::to_string(j + 1));
  return Dataset(std::move(trials), std::move(p), std::move(it));
}

// Ten trials from the mixture process, reused by the gradient checks.
inline Dataset ten_trial_dataset() {
  DesignSpec design{5, 2, 11};
  return gen_mixture(MixtureTruth{}, design).dataset;
}

inline std::vector<double> random_theta(const ParameterLayout& layout,
                                        double center, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  std::vector<double> theta(layout.dimension());
  for (double& t : theta) t = unif(rng);
  theta[0] = center + 0.25 * unif(rng);
  return theta;
}

}  // namespace rtmix::test
