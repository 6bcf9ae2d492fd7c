#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rtmix/sampler.hpp"

namespace rtmix {

using ChainSet = std::vector<std::vector<double>>;

// Split R-hat. Requires at least one chain of at least four draws, all of
// equal length. Returns +infinity when the within-chain variance is zero.
double split_rhat(const ChainSet& chains);

// Multi-chain effective sample size from autocorrelations, summed in
// consecutive pairs until the first negative pair. Returns 0 for constant
// chains.
double effective_sample_size(const ChainSet& chains);

struct Diagnostics {
  std::vector<std::string> names;
  std::vector<double> rhat;
  std::vector<double> ess;
  std::vector<std::size_t> divergences;  // per chain, post-warmup
  std::vector<std::string> warnings;

  double max_rhat() const;
};

// Flags a divergence rate above 10% in any chain as a warning.
Diagnostics diagnose(const PosteriorDraws& draws);

}  // namespace rtmix
