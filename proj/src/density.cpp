#include "rtmix/density.hpp"

#include <algorithm>

namespace rtmix {

std::vector<std::string> LogDensity::coordinate_names() const {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < dimension(); ++i)
    names.push_back("x[" + std::to_string(i + 1) + "]");
  return names;
}

void LogDensity::constrain(std::span<const double> x,
                           std::span<double> out) const {
  std::copy(x.begin(), x.end(), out.begin());
}

void LogDensity::initialize(Rng& rng, std::span<double> x) const {
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (double& v : x) v = unif(rng);
}

}  // namespace rtmix
