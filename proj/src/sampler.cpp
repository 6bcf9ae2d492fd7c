#include "rtmix/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rtmix/error.hpp"

namespace rtmix {

void SamplerConfig::validate() const {
  if (n_chains == 0 || n_warmup == 0 || n_samples == 0 || max_leapfrog == 0)
    throw DomainError("sampler counts must be at least 1");
  if (!(target_accept > 0.0 && target_accept < 1.0))
    throw DomainError("target_accept must lie in (0, 1)");
  if (!(path_length > 0.0) || !std::isfinite(path_length))
    throw DomainError("path_length must be positive");
}

PosteriorDraws::PosteriorDraws(std::vector<std::string> names,
                               std::size_t n_chains, std::size_t n_samples)
    : names_(std::move(names)),
      n_chains_(n_chains),
      n_samples_(n_samples),
      values_(n_chains * n_samples * names_.size()) {}

std::size_t PosteriorDraws::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  throw AlignmentError("draws have no coordinate named `" + std::string(name) +
                       "`");
}

std::vector<double> PosteriorDraws::pooled(std::size_t coord) const {
  std::vector<double> out;
  out.reserve(total_draws());
  for (std::size_t s = 0; s < total_draws(); ++s)
    out.push_back(values_[s * names_.size() + coord]);
  return out;
}

std::vector<std::vector<double>> PosteriorDraws::per_chain(
    std::size_t coord) const {
  std::vector<std::vector<double>> out(n_chains_);
  for (std::size_t c = 0; c < n_chains_; ++c) {
    out[c].reserve(n_samples_);
    for (std::size_t s = 0; s < n_samples_; ++s) out[c].push_back(at(c, s, coord));
  }
  return out;
}

double kinetic_energy(std::span<const double> momentum,
                      std::span<const double> inverse_metric) {
  double k = 0.0;
  for (std::size_t i = 0; i < momentum.size(); ++i)
    k += inverse_metric[i] * momentum[i] * momentum[i];
  return 0.5 * k;
}

bool leapfrog(const LogDensity& target, PhasePoint& point,
              std::span<double> momentum, std::span<const double> inverse_metric,
              double eps, std::size_t steps) {
  const std::size_t d = point.q.size();
  for (std::size_t step = 0; step < steps; ++step) {
    for (std::size_t i = 0; i < d; ++i) momentum[i] += 0.5 * eps * point.grad[i];
    for (std::size_t i = 0; i < d; ++i)
      point.q[i] += eps * inverse_metric[i] * momentum[i];
    point.log_density = target.log_density(point.q, point.grad);
    if (!std::isfinite(point.log_density)) return false;
    for (std::size_t i = 0; i < d; ++i) momentum[i] += 0.5 * eps * point.grad[i];
  }
  return true;
}

namespace {

void draw_momentum(Rng& rng, std::span<const double> inverse_metric,
                   std::span<double> momentum) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < momentum.size(); ++i)
    momentum[i] = normal(rng) / std::sqrt(inverse_metric[i]);
}

bool finite_point(const PhasePoint& point) {
  if (!std::isfinite(point.log_density)) return false;
  return std::all_of(point.grad.begin(), point.grad.end(),
                     [](double g) { return std::isfinite(g); });
}

}  // namespace

Transition hmc_transition(const LogDensity& target, PhasePoint& point,
                          std::span<const double> inverse_metric, double eps,
                          std::size_t steps, Rng& rng) {
  std::vector<double> momentum(point.q.size());
  draw_momentum(rng, inverse_metric, momentum);
  const double h0 = -point.log_density + kinetic_energy(momentum, inverse_metric);

  PhasePoint proposal = point;
  const bool finite =
      leapfrog(target, proposal, momentum, inverse_metric, eps, steps);
  const double h1 = finite ? -proposal.log_density +
                                 kinetic_energy(momentum, inverse_metric)
                           : std::numeric_limits<double>::infinity();

  Transition t;
  const double error = h1 - h0;
  if (!std::isfinite(error) || error > kDivergenceThreshold) {
    t.divergent = true;
    t.accept_prob = 0.0;
  } else {
    t.accept_prob = error <= 0.0 ? 1.0 : std::exp(-error);
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  if (!t.divergent && u < t.accept_prob) {
    point = std::move(proposal);
    t.accepted = true;
  }
  return t;
}

namespace {

// Dual averaging of log step size towards a target acceptance statistic.
class StepSizeAdapter {
 public:
  StepSizeAdapter(double target) : target_(target) {}

  void restart(double eps) {
    mu_ = std::log(10.0 * eps);
    counter_ = 0;
    s_bar_ = 0.0;
    x_bar_ = 0.0;
  }

  double update(double accept_prob) {
    ++counter_;
    const double t = static_cast<double>(counter_);
    const double eta = 1.0 / (t + kT0);
    s_bar_ = (1.0 - eta) * s_bar_ + eta * (target_ - accept_prob);
    const double x = mu_ - s_bar_ * std::sqrt(t) / kGamma;
    const double x_eta = std::pow(t, -kKappa);
    x_bar_ = (1.0 - x_eta) * x_bar_ + x_eta * x;
    return std::exp(x);
  }

  double averaged() const { return std::exp(x_bar_); }

 private:
  static constexpr double kGamma = 0.05;
  static constexpr double kT0 = 10.0;
  static constexpr double kKappa = 0.75;

  double target_;
  double mu_ = 0.0;
  std::size_t counter_ = 0;
  double s_bar_ = 0.0;
  double x_bar_ = 0.0;
};

class WelfordVariance {
 public:
  explicit WelfordVariance(std::size_t d) : mean_(d, 0.0), m2_(d, 0.0) {}

  void add(std::span<const double> x) {
    ++n_;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double delta = x[i] - mean_[i];
      mean_[i] += delta / static_cast<double>(n_);
      m2_[i] += delta * (x[i] - mean_[i]);
    }
  }

  // Sample variance shrunk towards 1e-3, as for small adaptation windows.
  std::vector<double> regularized() const {
    const double n = static_cast<double>(n_);
    std::vector<double> var(mean_.size());
    for (std::size_t i = 0; i < var.size(); ++i) {
      const double v = n > 1 ? m2_[i] / (n - 1.0) : 1.0;
      var[i] = (n / (n + 5.0)) * v + 1e-3 * (5.0 / (n + 5.0));
    }
    return var;
  }

  void reset() {
    n_ = 0;
    std::fill(mean_.begin(), mean_.end(), 0.0);
    std::fill(m2_.begin(), m2_.end(), 0.0);
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

// Doubles or halves eps until a single leapfrog step crosses an acceptance
// probability of 0.8.
double find_reasonable_step_size(const LogDensity& target,
                                 const PhasePoint& start,
                                 std::span<const double> inverse_metric,
                                 double eps, Rng& rng) {
  std::vector<double> momentum(start.q.size());
  auto log_accept = [&](double step) {
    draw_momentum(rng, inverse_metric, momentum);
    const double h0 =
        -start.log_density + kinetic_energy(momentum, inverse_metric);
    PhasePoint p = start;
    if (!leapfrog(target, p, momentum, inverse_metric, step, 1))
      return -std::numeric_limits<double>::infinity();
    const double h1 = -p.log_density + kinetic_energy(momentum, inverse_metric);
    return std::isfinite(h1) ? h0 - h1 : -std::numeric_limits<double>::infinity();
  };
  const double threshold = std::log(0.8);
  const int direction = log_accept(eps) > threshold ? 1 : -1;
  for (int iter = 0; iter < 100; ++iter) {
    const double next = direction == 1 ? 2.0 * eps : 0.5 * eps;
    if (next > 1e7 || next < 1e-10) break;
    const double la = log_accept(next);
    if (direction == 1 ? !(la > threshold) : la > threshold) {
      if (direction == -1) eps = next;
      break;
    }
    eps = next;
  }
  return eps;
}

// Metric adaptation windows within warmup: a 15% step-size-only opening,
// 75% of doubling windows (base 25) and a 10% closing step-size phase.
struct WarmupSchedule {
  std::vector<std::size_t> window_ends;  // exclusive iteration indices
  std::size_t slow_begin = 0;

  explicit WarmupSchedule(std::size_t n_warmup) {
    if (n_warmup < 20) return;
    const std::size_t init = n_warmup * 15 / 100;
    const std::size_t term = n_warmup / 10;
    const std::size_t slow_end = n_warmup - term;
    slow_begin = init;
    std::size_t start = init;
    std::size_t width = std::min<std::size_t>(25, slow_end - init);
    while (start < slow_end) {
      std::size_t end = start + width;
      if (end + 2 * width > slow_end) end = slow_end;
      window_ends.push_back(end);
      start = end;
      width *= 2;
    }
  }

  bool in_slow_phase(std::size_t iter) const {
    return !window_ends.empty() && iter >= slow_begin &&
           iter < window_ends.back();
  }
  bool window_closes_at(std::size_t iter) const {
    return std::find(window_ends.begin(), window_ends.end(), iter + 1) !=
           window_ends.end();
  }
};

constexpr std::size_t kMaxInitAttempts = 100;

PhasePoint initial_point(const LogDensity& target, Rng& rng) {
  PhasePoint point;
  point.q.resize(target.dimension());
  point.grad.resize(target.dimension());
  for (std::size_t attempt = 0; attempt < kMaxInitAttempts; ++attempt) {
    target.initialize(rng, point.q);
    point.log_density = target.log_density(point.q, point.grad);
    if (finite_point(point)) return point;
  }
  throw InitializationError("no finite log density and gradient after " +
                            std::to_string(kMaxInitAttempts) +
                            " initialization attempts");
}

std::size_t max_steps(const SamplerConfig& config, double eps) {
  const double steps = std::ceil(config.path_length / eps);
  if (!(steps < static_cast<double>(config.max_leapfrog))) return config.max_leapfrog;
  return std::max<std::size_t>(1, static_cast<std::size_t>(steps));
}

void run_chain(const LogDensity& target, const SamplerConfig& config,
               std::size_t chain, PosteriorDraws& draws) {
  ChainInfo& info = draws.chain_info[chain];
  info.seed = derive_seed(config.seed, SeedStream::Chain, chain);
  Rng rng(info.seed);

  const std::size_t d = target.dimension();
  PhasePoint point = initial_point(target, rng);
  std::vector<double> inverse_metric(d, 1.0);

  double eps = find_reasonable_step_size(target, point, inverse_metric, 1.0, rng);
  StepSizeAdapter adapter(config.target_accept);
  adapter.restart(eps);
  WelfordVariance variance(d);
  const WarmupSchedule schedule(config.n_warmup);

  auto steps_for = [&](double step) {
    std::uniform_int_distribution<std::size_t> pick(1, max_steps(config, step));
    return pick(rng);
  };

  for (std::size_t iter = 0; iter < config.n_warmup; ++iter) {
    const Transition t =
        hmc_transition(target, point, inverse_metric, eps, steps_for(eps), rng);
    if (t.divergent) ++info.warmup_divergences;
    eps = adapter.update(t.accept_prob);
    if (schedule.in_slow_phase(iter)) {
      variance.add(point.q);
      if (schedule.window_closes_at(iter)) {
        inverse_metric = variance.regularized();
        variance.reset();
        eps = find_reasonable_step_size(target, point, inverse_metric, eps, rng);
        adapter.restart(eps);
      }
    }
  }
  eps = adapter.averaged();
  info.step_size = eps;
  info.inverse_metric = inverse_metric;

  double accept_sum = 0.0;
  std::size_t step_sum = 0;
  for (std::size_t iter = 0; iter < config.n_samples; ++iter) {
    const std::size_t steps = steps_for(eps);
    step_sum += steps;
    const Transition t =
        hmc_transition(target, point, inverse_metric, eps, steps, rng);
    accept_sum += t.accept_prob;
    if (t.divergent) ++info.divergences;
    target.constrain(point.q, draws.row(chain, iter));
  }
  info.mean_accept_prob = accept_sum / static_cast<double>(config.n_samples);
  info.mean_leapfrog_steps =
      static_cast<double>(step_sum) / static_cast<double>(config.n_samples);
}

}  // namespace

PosteriorDraws sample(const LogDensity& target, const SamplerConfig& config) {
  config.validate();
  PosteriorDraws draws(target.coordinate_names(), config.n_chains,
                       config.n_samples);
  draws.config = config;
  draws.chain_info.resize(config.n_chains);
  for (std::size_t c = 0; c < config.n_chains; ++c)
    run_chain(target, config, c, draws);
  return draws;
}

PosteriorDraws sample(ModelKind kind, const Dataset& dataset,
                      const SamplerConfig& config) {
  if (dataset.empty()) throw DomainError("cannot sample from an empty dataset");
  const HierarchicalPosterior posterior(kind, dataset);
  return sample(posterior, config);
}

}  // namespace rtmix
