#include "rtmix/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "rtmix/crossval.hpp"
#include "rtmix/error.hpp"
#include "rtmix/format.hpp"
#include "rtmix/random.hpp"

namespace rtmix {

namespace {

std::vector<Trial> latin_square(const DesignSpec& design) {
  std::vector<Trial> trials;
  trials.reserve(design.n_participants * design.n_items);
  for (std::size_t i = 0; i < design.n_participants; ++i) {
    for (std::size_t j = 0; j < design.n_items; ++j) {
      Trial t;
      t.participant = i;
      t.item = j;
      t.condition = (i + j) % 2 == 0 ? Condition::SubjectRelative
                                     : Condition::ObjectRelative;
      trials.push_back(t);
    }
  }
  return trials;
}

std::vector<std::string> numbered(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i + 1));
  return labels;
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw DomainError(std::string(name) + " must be positive");
}

// Draws u, w and the per-trial standard normal noise in the documented order.
struct Draws {
  std::vector<double> u, w, noise;
};

Draws base_draws(const DesignSpec& design, double sigma_u, double sigma_w,
                 std::size_t n_trials) {
  Rng rng(derive_seed(design.seed, SeedStream::Simulation, 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  Draws d;
  for (std::size_t i = 0; i < design.n_participants; ++i)
    d.u.push_back(sigma_u * normal(rng));
  for (std::size_t j = 0; j < design.n_items; ++j)
    d.w.push_back(sigma_w * normal(rng));
  for (std::size_t n = 0; n < n_trials; ++n) d.noise.push_back(normal(rng));
  return d;
}

}  // namespace

NamedValues named_values(const LinearTruth& t) {
  return {{"beta0", t.beta0},
          {"beta1", t.beta1},
          {"sigma_e", t.sigma_e},
          {"sigma_u", t.sigma_u},
          {"sigma_w", t.sigma_w}};
}

NamedValues named_values(const MixtureTruth& t) {
  return {{"beta", t.beta},       {"delta", t.delta},
          {"p_sr", t.p_sr},       {"p_or", t.p_or},
          {"sigma_e", t.sigma_e}, {"sigma_e_prime", t.sigma_ep},
          {"sigma_u", t.sigma_u}, {"sigma_w", t.sigma_w}};
}

Simulation gen_linear(const LinearTruth& truth, const DesignSpec& design) {
  require_positive(truth.sigma_e, "sigma_e");
  require_positive(truth.sigma_u, "sigma_u");
  require_positive(truth.sigma_w, "sigma_w");
  auto trials = latin_square(design);
  Draws d = base_draws(design, truth.sigma_u, truth.sigma_w, trials.size());
  for (std::size_t n = 0; n < trials.size(); ++n) {
    Trial& t = trials[n];
    const double mu = truth.beta0 + truth.beta1 * sum_code(t.condition) +
                      d.u[t.participant] + d.w[t.item];
    t.rt_ms = std::exp(mu + truth.sigma_e * d.noise[n]);
  }
  Simulation sim;
  sim.dataset = Dataset(std::move(trials), numbered(design.n_participants),
                        numbered(design.n_items));
  sim.u = std::move(d.u);
  sim.w = std::move(d.w);
  return sim;
}

Simulation gen_mixture(const MixtureTruth& truth, const DesignSpec& design) {
  require_positive(truth.sigma_e, "sigma_e");
  require_positive(truth.sigma_ep, "sigma_e_prime");
  require_positive(truth.sigma_u, "sigma_u");
  require_positive(truth.sigma_w, "sigma_w");
  require_positive(truth.delta, "delta");
  if (!(truth.p_sr >= 0.0 && truth.p_sr <= 1.0 && truth.p_or >= 0.0 &&
        truth.p_or <= 1.0))
    throw DomainError("mixing probabilities must lie in [0, 1]");

  auto trials = latin_square(design);
  Draws d = base_draws(design, truth.sigma_u, truth.sigma_w, trials.size());
  Rng select(derive_seed(design.seed, SeedStream::Selection, 0));
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Simulation sim;
  sim.failure.resize(trials.size());
  for (std::size_t n = 0; n < trials.size(); ++n) {
    Trial& t = trials[n];
    const double p =
        t.condition == Condition::SubjectRelative ? truth.p_sr : truth.p_or;
    const bool failure = unif(select) < p;
    const double mu = truth.beta + d.u[t.participant] + d.w[t.item];
    t.rt_ms = failure ? std::exp(mu + truth.delta + truth.sigma_ep * d.noise[n])
                      : std::exp(mu + truth.sigma_e * d.noise[n]);
    sim.failure[n] = failure;
  }
  sim.dataset = Dataset(std::move(trials), numbered(design.n_participants),
                        numbered(design.n_items));
  sim.u = std::move(d.u);
  sim.w = std::move(d.w);
  return sim;
}

RecoveryReport recovery_check(const NamedValues& truth,
                              const PosteriorDraws& draws, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw DomainError("credible level must lie in (0, 1)");
  RecoveryReport report;
  report.level = level;
  const double tail = (1.0 - level) / 2.0;
  std::size_t covered = 0;
  for (const auto& [name, value] : truth) {
    std::vector<double> v = draws.pooled(draws.index_of(name));
    std::sort(v.begin(), v.end());
    ParameterRecovery r;
    r.name = name;
    r.truth = value;
    r.mean = mean(v);
    r.lower = quantile_sorted(v, tail);
    r.upper = quantile_sorted(v, 1.0 - tail);
    r.covered = r.lower <= value && value <= r.upper;
    covered += r.covered;
    report.parameters.push_back(r);
  }
  report.coverage_rate = truth.empty() ? 0.0
                                       : static_cast<double>(covered) /
                                             static_cast<double>(truth.size());
  return report;
}

std::vector<PpcReplicate> condition_statistics(std::span<const Trial> trials) {
  std::vector<PpcReplicate> out;
  for (Condition c : {Condition::SubjectRelative, Condition::ObjectRelative}) {
    std::vector<double> rt, log_rt;
    for (const Trial& t : trials) {
      if (t.condition != c) continue;
      rt.push_back(t.rt_ms);
      log_rt.push_back(std::log(t.rt_ms));
    }
    if (rt.empty()) continue;
    std::sort(rt.begin(), rt.end());
    PpcReplicate r;
    r.condition = c;
    r.median = quantile_sorted(rt, 0.5);
    r.log_sd = std::sqrt(sample_variance(log_rt));
    r.q90 = quantile_sorted(rt, 0.9);
    out.push_back(r);
  }
  return out;
}

namespace {

double statistic_of(const PpcReplicate& r, std::size_t which) {
  switch (which) {
    case 0: return r.median;
    case 1: return r.log_sd;
    default: return r.q90;
  }
}

constexpr const char* kStatisticNames[] = {"median", "log_sd", "q90"};

}  // namespace

PpcSummary posterior_predictive(const PosteriorDraws& draws, ModelKind kind,
                                const Dataset& dataset, std::size_t replicates,
                                std::uint64_t seed) {
  if (replicates == 0) throw DomainError("need at least one replicate");
  const ParameterLayout layout(kind, dataset.n_participants(), dataset.n_items());
  if (draws.n_coordinates() != layout.dimension())
    throw AlignmentError("draws do not match the model for this dataset");
  const std::size_t S = draws.total_draws();
  if (S == 0) throw DomainError("no posterior draws");

  const std::size_t I = dataset.n_participants();
  PpcSummary summary;
  summary.model = std::string(model_name(kind));
  summary.replicates = replicates;

  std::vector<Trial> trials = dataset.trials();
  for (std::size_t r = 0; r < replicates; ++r) {
    const std::size_t s = replicates == 1 ? S - 1 : r * (S - 1) / (replicates - 1);
    const auto row = draws.row(s);
    Rng rng(derive_seed(seed, SeedStream::Predictive, r));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Trial& t : trials) {
      if (kind == ModelKind::Linear) {
        const double mu = row[0] + row[1] * sum_code(t.condition) +
                          row[5 + t.participant] + row[5 + I + t.item];
        t.rt_ms = std::exp(mu + row[2] * normal(rng));
      } else {
        const double mu = row[0] + row[8 + t.participant] + row[8 + I + t.item];
        const double p =
            t.condition == Condition::SubjectRelative ? row[2] : row[3];
        const bool failure = unif(rng) < p;
        const double z = normal(rng);
        t.rt_ms = failure ? std::exp(mu + row[1] + row[5] * z)
                          : std::exp(mu + row[4] * z);
      }
    }
    for (PpcReplicate rep : condition_statistics(trials)) {
      rep.replicate = r;
      rep.draw = s;
      summary.replicate_statistics.push_back(rep);
    }
  }

  for (const PpcReplicate& obs : condition_statistics(dataset.trials())) {
    for (std::size_t which = 0; which < 3; ++which) {
      std::vector<double> values;
      for (const PpcReplicate& rep : summary.replicate_statistics)
        if (rep.condition == obs.condition)
          values.push_back(statistic_of(rep, which));
      std::sort(values.begin(), values.end());
      PpcStatistic st;
      st.condition = obs.condition;
      st.statistic = kStatisticNames[which];
      st.observed = statistic_of(obs, which);
      st.replicate_mean = mean(values);
      st.replicate_lower = quantile_sorted(values, 0.025);
      st.replicate_upper = quantile_sorted(values, 0.975);
      const auto at_least =
          values.end() - std::lower_bound(values.begin(), values.end(), st.observed);
      st.p_upper = static_cast<double>(at_least) / static_cast<double>(values.size());
      st.extreme = st.observed < st.replicate_lower || st.observed > st.replicate_upper;
      summary.statistics.push_back(st);
    }
  }
  return summary;
}

}  // namespace rtmix
