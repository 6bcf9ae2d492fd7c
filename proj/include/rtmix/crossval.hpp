#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rtmix/data.hpp"
#include "rtmix/model.hpp"
#include "rtmix/sampler.hpp"

namespace rtmix {

// log((1/S) sum exp(v)), shifted by the maximum. Throws DomainError on empty
// input.
double log_mean_exp(std::span<const double> values);

// Per-draw log likelihood of one trial under the constrained draw `row`.
double draw_loglik(ModelKind kind, std::span<const double> row,
                   std::size_t n_participants, std::size_t n_items,
                   const Trial& trial);

// elpd_i = log mean_s p(y_i | theta_s) for each held-out trial, in the order
// given. `dataset` supplies the trials; its participant/item indexing must
// match the draws' random effects.
std::vector<double> pointwise_elpd(const Dataset& dataset,
                                   std::span<const std::size_t> heldout,
                                   const PosteriorDraws& draws, ModelKind kind);

struct ElpdReport {
  std::string model;
  std::vector<double> pointwise;  // one entry per trial, in trial order
  double total = 0.0;             // sum of pointwise, left to right
  double se_total = 0.0;          // sqrt(n * Var(pointwise))
  std::vector<std::string> warnings;
  std::uint64_t plan_fingerprint = 0;
};

// Fills total and se_total from pointwise.
ElpdReport make_report(std::string model, std::vector<double> pointwise,
                       std::uint64_t plan_fingerprint = 0);

struct ElpdComparison {
  std::string model_a;
  std::string model_b;
  std::vector<double> pointwise_diff;  // a_i - b_i
  double diff = 0.0;
  double se_diff = 0.0;  // sqrt(n * Var(pointwise_diff))

  // Label of the model with the larger elpd; "tie" when diff == 0.
  std::string winner() const;
};

// Throws AlignmentError when a and b do not cover the same trials under the
// same fold plan.
ElpdComparison compare(const ElpdReport& a, const ElpdReport& b);

// R-hat above this on any coordinate of a fold's fit is reported as a warning.
inline constexpr double kRhatWarning = 1.05;

// Refits `kind` on each training set and scores its held-out trials. Fold k
// (zero-based) samples with seed derive_seed(config.seed, SeedStream::Fold, k).
// `fold_order` permutes execution only; the report does not depend on it.
ElpdReport run_kfold(ModelKind kind, const Dataset& dataset,
                     const FoldPlan& plan, const SamplerConfig& config,
                     std::span<const std::size_t> fold_order = {});

}  // namespace rtmix
