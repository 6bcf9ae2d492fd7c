#include "rtmix/crossval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rtmix/diagnostics.hpp"
#include "rtmix/error.hpp"
#include "rtmix/format.hpp"

namespace rtmix {

double log_mean_exp(std::span<const double> values) {
  if (values.empty()) throw DomainError("log_mean_exp of an empty vector");
  const double m = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(m)) return m;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - m);
  return m + std::log(sum / static_cast<double>(values.size()));
}

double draw_loglik(ModelKind kind, std::span<const double> row,
                   std::size_t n_participants, std::size_t n_items,
                   const Trial& trial) {
  if (trial.participant >= n_participants || trial.item >= n_items)
    throw DomainError("trial participant/item outside the fitted random effects");
  if (kind == ModelKind::Linear) {
    const double mu = row[0] + row[1] * sum_code(trial.condition) +
                      row[5 + trial.participant] +
                      row[5 + n_participants + trial.item];
    return lognormal_lpdf(trial.rt_ms, mu, row[2]);
  }
  const double mu =
      row[0] + row[8 + trial.participant] + row[8 + n_participants + trial.item];
  const double p =
      trial.condition == Condition::SubjectRelative ? row[2] : row[3];
  const double success = lognormal_lpdf(trial.rt_ms, mu, row[4]);
  const double failure = lognormal_lpdf(trial.rt_ms, mu + row[1], row[5]);
  if (p == 0.0) return success;
  if (p == 1.0) return failure;
  return log_sum_exp(std::log(p) + failure, std::log1p(-p) + success);
}

std::vector<double> pointwise_elpd(const Dataset& dataset,
                                   std::span<const std::size_t> heldout,
                                   const PosteriorDraws& draws, ModelKind kind) {
  const ParameterLayout layout(kind, dataset.n_participants(), dataset.n_items());
  if (draws.n_coordinates() != layout.dimension())
    throw AlignmentError("draws do not match the " +
                         std::string(model_name(kind)) +
                         " model for this dataset");
  if (draws.total_draws() == 0) throw DomainError("no posterior draws");

  const std::size_t S = draws.total_draws();
  std::vector<std::vector<double>> loglik(heldout.size(), std::vector<double>(S));
  for (std::size_t s = 0; s < S; ++s) {
    const auto row = draws.row(s);
    for (std::size_t h = 0; h < heldout.size(); ++h) {
      const std::size_t i = heldout[h];
      const double ll = draw_loglik(kind, row, dataset.n_participants(),
                                    dataset.n_items(), dataset[i]);
      if (!std::isfinite(ll))
        throw NumericalError("non-finite log likelihood for trial " +
                             std::to_string(i) + " at draw " +
                             std::to_string(s));
      loglik[h][s] = ll;
    }
  }
  std::vector<double> out;
  out.reserve(heldout.size());
  for (const auto& v : loglik) out.push_back(log_mean_exp(v));
  return out;
}

ElpdReport make_report(std::string model, std::vector<double> pointwise,
                       std::uint64_t plan_fingerprint) {
  ElpdReport r;
  r.model = std::move(model);
  r.total = 0.0;
  for (double v : pointwise) r.total += v;
  const double n = static_cast<double>(pointwise.size());
  r.se_total = std::sqrt(n * sample_variance(pointwise));
  r.pointwise = std::move(pointwise);
  r.plan_fingerprint = plan_fingerprint;
  return r;
}

std::string ElpdComparison::winner() const {
  if (diff > 0.0) return model_a;
  if (diff < 0.0) return model_b;
  return "tie";
}

ElpdComparison compare(const ElpdReport& a, const ElpdReport& b) {
  if (a.pointwise.size() != b.pointwise.size())
    throw AlignmentError("reports cover " + std::to_string(a.pointwise.size()) +
                         " and " + std::to_string(b.pointwise.size()) +
                         " trials");
  if (a.plan_fingerprint != b.plan_fingerprint)
    throw AlignmentError("reports were scored under different fold plans");
  ElpdComparison c;
  c.model_a = a.model;
  c.model_b = b.model;
  c.pointwise_diff.resize(a.pointwise.size());
  for (std::size_t i = 0; i < a.pointwise.size(); ++i)
    c.pointwise_diff[i] = a.pointwise[i] - b.pointwise[i];
  c.diff = 0.0;
  for (double d : c.pointwise_diff) c.diff += d;
  const double n = static_cast<double>(c.pointwise_diff.size());
  c.se_diff = std::sqrt(n * sample_variance(c.pointwise_diff));
  return c;
}

ElpdReport run_kfold(ModelKind kind, const Dataset& dataset,
                     const FoldPlan& plan, const SamplerConfig& config,
                     std::span<const std::size_t> fold_order) {
  if (plan.assignment.size() != dataset.size())
    throw AlignmentError("fold plan does not match the dataset");
  std::vector<std::size_t> order(plan.k);
  std::iota(order.begin(), order.end(), 0);
  if (!fold_order.empty()) {
    std::vector<std::size_t> sorted(fold_order.begin(), fold_order.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted != order) throw DomainError("fold_order is not a permutation");
    order.assign(fold_order.begin(), fold_order.end());
  }

  std::vector<double> pointwise(dataset.size(), 0.0);
  std::vector<std::vector<std::string>> fold_warnings(plan.k);
  for (std::size_t k : order) {
    const auto train_idx = plan.training(k);
    const auto heldout = plan.heldout(k);
    SamplerConfig fold_config = config;
    fold_config.seed = derive_seed(config.seed, SeedStream::Fold, k);
    PosteriorDraws draws;
    try {
      draws = sample(kind, dataset.subset(train_idx), fold_config);
    } catch (const InitializationError& e) {
      throw FoldError(k + 1, e.what());
    }
    const auto elpd = pointwise_elpd(dataset, heldout, draws, kind);
    for (std::size_t h = 0; h < heldout.size(); ++h) pointwise[heldout[h]] = elpd[h];

    const Diagnostics diag = diagnose(draws);
    for (std::size_t c = 0; c < diag.rhat.size(); ++c) {
      if (!(diag.rhat[c] <= kRhatWarning)) {
        fold_warnings[k].push_back("fold " + std::to_string(k + 1) + ": R-hat " +
                                   format_fixed(diag.rhat[c], 3) + " for " +
                                   diag.names[c]);
      }
    }
    for (const auto& w : diag.warnings)
      fold_warnings[k].push_back("fold " + std::to_string(k + 1) + ": " + w);
  }

  ElpdReport report =
      make_report(std::string(model_name(kind)), std::move(pointwise),
                  plan.fingerprint());
  for (auto& w : fold_warnings)
    report.warnings.insert(report.warnings.end(), w.begin(), w.end());
  return report;
}

}  // namespace rtmix
