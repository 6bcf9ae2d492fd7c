#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rtmix/random.hpp"

namespace rtmix {

// A differentiable log density on R^d, the sampler's only view of a model.
class LogDensity {
 public:
  virtual ~LogDensity() = default;

  virtual std::size_t dimension() const = 0;

  // Log density at x, up to an additive constant. When grad is nonempty it
  // receives the gradient. Non-finite results are returned, not thrown.
  virtual double log_density(std::span<const double> x,
                             std::span<double> grad) const = 0;

  // Names of the constrained coordinates; defaults to x[1]..x[d].
  virtual std::vector<std::string> coordinate_names() const;

  // Maps an unconstrained point to the reported scale; defaults to identity.
  virtual void constrain(std::span<const double> x, std::span<double> out) const;

  // Starting point for a chain; defaults to uniform on [-2, 2]^d.
  virtual void initialize(Rng& rng, std::span<double> x) const;
};

}  // namespace rtmix
