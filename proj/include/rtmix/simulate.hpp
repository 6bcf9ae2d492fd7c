#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rtmix/data.hpp"
#include "rtmix/model.hpp"
#include "rtmix/sampler.hpp"

namespace rtmix {

// Every participant reads every item once; participant i sees item j as a
// subject relative when i + j is even, so conditions alternate Latin-square
// style and per-participant counts differ by at most one.
struct DesignSpec {
  std::size_t n_participants = 37;
  std::size_t n_items = 15;
  std::uint64_t seed = 1;
};

// Population-level values of the linear model.
struct LinearTruth {
  double beta0 = 6.06;
  double beta1 = -0.07;
  double sigma_e = 0.52;
  double sigma_u = 0.25;
  double sigma_w = 0.20;
};

// Population-level values of the mixture model.
struct MixtureTruth {
  double beta = 5.85;
  double delta = 0.93;
  double p_sr = 0.25;
  double p_or = 0.21;
  double sigma_e = 0.22;
  double sigma_ep = 0.64;
  double sigma_u = 0.24;
  double sigma_w = 0.09;
};

using NamedValues = std::vector<std::pair<std::string, double>>;

NamedValues named_values(const LinearTruth& truth);
NamedValues named_values(const MixtureTruth& truth);

struct Simulation {
  Dataset dataset;
  std::vector<double> u;             // realized participant intercepts
  std::vector<double> w;             // realized item intercepts
  std::vector<unsigned char> failure;  // mixture only: 1 if slow component
};

// Both generators draw u (I normals), then w (J normals), then one noise
// normal per trial from derive_seed(seed, Simulation, 0). The mixture
// component is chosen from a separate stream (Selection), so with
// p_sr = p_or = 0 gen_mixture reproduces gen_linear with beta1 = 0 exactly.
Simulation gen_linear(const LinearTruth& truth, const DesignSpec& design);
Simulation gen_mixture(const MixtureTruth& truth, const DesignSpec& design);

struct ParameterRecovery {
  std::string name;
  double truth = 0.0;
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool covered = false;
};

struct RecoveryReport {
  double level = 0.95;
  std::vector<ParameterRecovery> parameters;
  double coverage_rate = 0.0;
};

// Central `level` credible intervals from draw quantiles (linear
// interpolation). Throws AlignmentError if a name is not in the draws.
RecoveryReport recovery_check(const NamedValues& truth,
                              const PosteriorDraws& draws, double level = 0.95);

struct PpcStatistic {
  Condition condition = Condition::SubjectRelative;
  std::string statistic;  // "median", "log_sd" or "q90"
  double observed = 0.0;
  double replicate_mean = 0.0;
  double replicate_lower = 0.0;  // 2.5% quantile
  double replicate_upper = 0.0;  // 97.5% quantile
  double p_upper = 0.0;          // fraction of replicates >= observed
  bool extreme = false;          // observed outside [lower, upper]
};

struct PpcReplicate {
  std::size_t replicate = 0;
  std::size_t draw = 0;
  Condition condition = Condition::SubjectRelative;
  double median = 0.0;
  double log_sd = 0.0;
  double q90 = 0.0;
};

struct PpcSummary {
  std::string model;
  std::size_t replicates = 0;
  std::vector<PpcStatistic> statistics;
  std::vector<PpcReplicate> replicate_statistics;
};

// Per-condition median rt, SD of log rt and 0.9 quantile of rt.
std::vector<PpcReplicate> condition_statistics(std::span<const Trial> trials);

// Simulates `replicates` datasets with the trial structure of `dataset`, one
// per posterior draw (evenly spaced over all retained draws, using that
// draw's fitted u and w), and locates the observed statistics in the
// replicate distributions.
PpcSummary posterior_predictive(const PosteriorDraws& draws, ModelKind kind,
                                const Dataset& dataset,
                                std::size_t replicates = 200,
                                std::uint64_t seed = 1);

}  // namespace rtmix
