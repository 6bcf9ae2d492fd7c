#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rtmix/data.hpp"
#include "rtmix/density.hpp"
#include "rtmix/model.hpp"
#include "rtmix/random.hpp"

namespace rtmix {

struct SamplerConfig {
  std::size_t n_chains = 4;
  std::size_t n_warmup = 1000;
  std::size_t n_samples = 1000;
  std::uint64_t seed = 1;
  double target_accept = 0.8;
  std::size_t max_leapfrog = 1024;
  // Integration time of the longest trajectory; the step count of each
  // transition is uniform in [1, min(max_leapfrog, ceil(path_length / eps))].
  double path_length = 4.0;

  // Throws DomainError on a zero count or target_accept outside (0, 1).
  void validate() const;
};

struct ChainInfo {
  std::uint64_t seed = 0;
  double step_size = 0.0;
  std::vector<double> inverse_metric;
  double mean_accept_prob = 0.0;   // post-warmup
  std::size_t divergences = 0;     // post-warmup
  std::size_t warmup_divergences = 0;
  double mean_leapfrog_steps = 0.0;
};

// Retained draws on the constrained scale, stored chain-major with one
// contiguous row of coordinates per draw.
class PosteriorDraws {
 public:
  PosteriorDraws() = default;
  PosteriorDraws(std::vector<std::string> names, std::size_t n_chains,
                 std::size_t n_samples);

  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t n_chains() const noexcept { return n_chains_; }
  std::size_t n_samples() const noexcept { return n_samples_; }
  std::size_t n_coordinates() const noexcept { return names_.size(); }
  std::size_t total_draws() const noexcept { return n_chains_ * n_samples_; }

  double at(std::size_t chain, std::size_t iter, std::size_t coord) const {
    return values_[(chain * n_samples_ + iter) * names_.size() + coord];
  }
  std::span<double> row(std::size_t chain, std::size_t iter) {
    return {values_.data() + (chain * n_samples_ + iter) * names_.size(),
            names_.size()};
  }
  std::span<const double> row(std::size_t chain, std::size_t iter) const {
    return {values_.data() + (chain * n_samples_ + iter) * names_.size(),
            names_.size()};
  }
  // Draw s in 0..total_draws(), chains concatenated.
  std::span<const double> row(std::size_t s) const {
    return {values_.data() + s * names_.size(), names_.size()};
  }

  // Throws AlignmentError for unknown names.
  std::size_t index_of(std::string_view name) const;

  std::vector<double> pooled(std::size_t coord) const;
  std::vector<std::vector<double>> per_chain(std::size_t coord) const;

  std::vector<ChainInfo> chain_info;
  SamplerConfig config;

 private:
  std::vector<std::string> names_;
  std::size_t n_chains_ = 0;
  std::size_t n_samples_ = 0;
  std::vector<double> values_;
};

// Position, log density and gradient of a point on the unconstrained scale.
struct PhasePoint {
  std::vector<double> q;
  std::vector<double> grad;
  double log_density = 0.0;
};

// Advances (point, momentum) by `steps` leapfrog steps of size eps under the
// diagonal inverse metric. Stops early, returning false, once the log
// density turns non-finite.
bool leapfrog(const LogDensity& target, PhasePoint& point,
              std::span<double> momentum, std::span<const double> inverse_metric,
              double eps, std::size_t steps);

double kinetic_energy(std::span<const double> momentum,
                      std::span<const double> inverse_metric);

struct Transition {
  double accept_prob = 0.0;
  bool accepted = false;
  bool divergent = false;
};

// Energy error above which a trajectory is flagged divergent.
inline constexpr double kDivergenceThreshold = 1000.0;

// One Metropolis-corrected HMC transition with a fresh momentum draw.
Transition hmc_transition(const LogDensity& target, PhasePoint& point,
                          std::span<const double> inverse_metric, double eps,
                          std::size_t steps, Rng& rng);

// Runs config.n_chains independent chains; chain c uses the sub-seed
// derive_seed(config.seed, SeedStream::Chain, c).
PosteriorDraws sample(const LogDensity& target, const SamplerConfig& config);
PosteriorDraws sample(ModelKind kind, const Dataset& dataset,
                      const SamplerConfig& config);

}  // namespace rtmix
