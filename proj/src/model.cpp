#include "rtmix/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rtmix/error.hpp"

namespace rtmix {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

// log(1 / (1 + exp(-x)))
double log_inv_logit(double x) noexcept {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double inv_logit(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) noexcept { return std::log(p) - std::log1p(-p); }

// Half-Cauchy prior on exp(t) plus the log Jacobian t, and its derivative.
double log_scale_prior(double t, double* grad) noexcept {
  const double sigma = std::exp(t);
  const double s2 = kPriorScale * kPriorScale;
  if (grad) *grad = 1.0 - 2.0 * sigma * sigma / (s2 + sigma * sigma);
  return half_cauchy_lpdf(sigma, kPriorScale) + t;
}

double coefficient_prior(double b, double* grad) noexcept {
  if (grad) *grad = -2.0 * b / (kPriorScale * kPriorScale + b * b);
  return cauchy_lpdf(b, 0.0, kPriorScale);
}

// Beta(1, 1) prior (zero) plus log Jacobian log p + log(1 - p).
double probability_prior(double l, double* grad) noexcept {
  if (grad) *grad = 1.0 - 2.0 * inv_logit(l);
  return log_inv_logit(l) + log_inv_logit(-l);
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw DomainError(std::string(name) + " must be positive and finite");
}

void require_probability(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError(std::string(name) + " must lie in (0, 1)");
}

void check_indices(const Trial& trial, std::size_t n_u, std::size_t n_w) {
  if (trial.participant >= n_u || trial.item >= n_w)
    throw DomainError("trial participant/item index outside the random effects");
}

double checked(double value, const char* what) {
  if (!std::isfinite(value))
    throw NumericalError(std::string("non-finite ") + what);
  return value;
}

}  // namespace

std::string_view model_name(ModelKind kind) noexcept {
  return kind == ModelKind::Linear ? "linear" : "mixture";
}

std::optional<ModelKind> parse_model(std::string_view name) {
  if (name == "linear") return ModelKind::Linear;
  if (name == "mixture") return ModelKind::Mixture;
  return std::nullopt;
}

ParameterLayout::ParameterLayout(ModelKind kind, std::size_t n_participants,
                                 std::size_t n_items)
    : kind_(kind), n_participants_(n_participants), n_items_(n_items) {
  using T = Transform;
  if (kind == ModelKind::Linear) {
    names_ = {"beta0", "beta1", "sigma_e", "sigma_u", "sigma_w"};
    transforms_ = {T::Identity, T::Identity, T::Log, T::Log, T::Log};
  } else {
    names_ = {"beta",    "delta",         "p_sr",    "p_or",
              "sigma_e", "sigma_e_prime", "sigma_u", "sigma_w"};
    transforms_ = {T::Identity, T::Log,          T::Logit, T::Logit,
                   T::Log,      T::OrderedScale, T::Log,   T::Log};
  }
  for (std::size_t i = 0; i < n_participants; ++i) {
    names_.push_back("u[" + std::to_string(i + 1) + "]");
    transforms_.push_back(T::ParticipantEffect);
  }
  for (std::size_t j = 0; j < n_items; ++j) {
    names_.push_back("w[" + std::to_string(j + 1) + "]");
    transforms_.push_back(T::ItemEffect);
  }
}

std::size_t ParameterLayout::n_population() const noexcept {
  return kind_ == ModelKind::Linear ? 5 : 8;
}

std::size_t ParameterLayout::sigma_u_index() const noexcept {
  return kind_ == ModelKind::Linear ? 3 : 6;
}

std::size_t ParameterLayout::sigma_w_index() const noexcept {
  return kind_ == ModelKind::Linear ? 4 : 7;
}

std::size_t ParameterLayout::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  throw AlignmentError("no coordinate named `" + std::string(name) + "`");
}

std::vector<double> constrain(const ParameterLayout& layout,
                              std::span<const double> theta) {
  if (theta.size() != layout.dimension())
    throw AlignmentError("parameter vector has " +
                         std::to_string(theta.size()) + " coordinates, expected " +
                         std::to_string(layout.dimension()));
  const double sigma_u = std::exp(theta[layout.sigma_u_index()]);
  const double sigma_w = std::exp(theta[layout.sigma_w_index()]);
  std::vector<double> out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    switch (layout.transforms()[i]) {
      case Transform::Identity: out[i] = theta[i]; break;
      case Transform::Log: out[i] = std::exp(theta[i]); break;
      case Transform::Logit: out[i] = inv_logit(theta[i]); break;
      case Transform::OrderedScale:
        out[i] = std::exp(theta[i - 1]) + std::exp(theta[i]);
        break;
      case Transform::ParticipantEffect: out[i] = sigma_u * theta[i]; break;
      case Transform::ItemEffect: out[i] = sigma_w * theta[i]; break;
    }
  }
  return out;
}

UnconstrainedVector unconstrain(const ParameterLayout& layout,
                                std::span<const double> constrained) {
  if (constrained.size() != layout.dimension())
    throw AlignmentError("parameter vector has the wrong length");
  const double sigma_u = constrained[layout.sigma_u_index()];
  const double sigma_w = constrained[layout.sigma_w_index()];
  UnconstrainedVector out(constrained.size());
  for (std::size_t i = 0; i < constrained.size(); ++i) {
    const double v = constrained[i];
    switch (layout.transforms()[i]) {
      case Transform::Identity: out[i] = v; break;
      case Transform::Log:
        require_positive(v, layout.names()[i].c_str());
        out[i] = std::log(v);
        break;
      case Transform::Logit:
        require_probability(v, layout.names()[i].c_str());
        out[i] = logit(v);
        break;
      case Transform::OrderedScale:
        if (!(v > constrained[i - 1]) || !std::isfinite(v))
          throw DomainError(layout.names()[i] + " must exceed " +
                            layout.names()[i - 1]);
        out[i] = std::log(v - constrained[i - 1]);
        break;
      case Transform::ParticipantEffect: out[i] = v / sigma_u; break;
      case Transform::ItemEffect: out[i] = v / sigma_w; break;
    }
  }
  return out;
}

LinearParams linear_from_flat(std::span<const double> c, std::size_t n_participants,
                              std::size_t n_items) {
  if (c.size() != 5 + n_participants + n_items)
    throw AlignmentError("linear parameter vector has the wrong length");
  LinearParams p;
  p.beta0 = c[0];
  p.beta1 = c[1];
  p.sigma_e = c[2];
  p.sigma_u = c[3];
  p.sigma_w = c[4];
  p.u.assign(c.begin() + 5, c.begin() + 5 + n_participants);
  p.w.assign(c.begin() + 5 + n_participants, c.end());
  return p;
}

MixtureParams mixture_from_flat(std::span<const double> c,
                                std::size_t n_participants, std::size_t n_items) {
  if (c.size() != 8 + n_participants + n_items)
    throw AlignmentError("mixture parameter vector has the wrong length");
  MixtureParams p;
  p.beta = c[0];
  p.delta = c[1];
  p.p_sr = c[2];
  p.p_or = c[3];
  p.sigma_e = c[4];
  p.sigma_ep = c[5];
  p.sigma_u = c[6];
  p.sigma_w = c[7];
  p.u.assign(c.begin() + 8, c.begin() + 8 + n_participants);
  p.w.assign(c.begin() + 8 + n_participants, c.end());
  return p;
}

std::vector<double> flatten(const LinearParams& p) {
  std::vector<double> out = {p.beta0, p.beta1, p.sigma_e, p.sigma_u, p.sigma_w};
  out.insert(out.end(), p.u.begin(), p.u.end());
  out.insert(out.end(), p.w.begin(), p.w.end());
  return out;
}

std::vector<double> flatten(const MixtureParams& p) {
  std::vector<double> out = {p.beta,    p.delta,    p.p_sr,    p.p_or,
                             p.sigma_e, p.sigma_ep, p.sigma_u, p.sigma_w};
  out.insert(out.end(), p.u.begin(), p.u.end());
  out.insert(out.end(), p.w.begin(), p.w.end());
  return out;
}

LinearParams constrain_linear(std::span<const double> theta,
                              std::size_t n_participants, std::size_t n_items) {
  const ParameterLayout layout(ModelKind::Linear, n_participants, n_items);
  return linear_from_flat(constrain(layout, theta), n_participants, n_items);
}

MixtureParams constrain_mixture(std::span<const double> theta,
                                std::size_t n_participants, std::size_t n_items) {
  const ParameterLayout layout(ModelKind::Mixture, n_participants, n_items);
  return mixture_from_flat(constrain(layout, theta), n_participants, n_items);
}

UnconstrainedVector unconstrain(const LinearParams& params) {
  const ParameterLayout layout(ModelKind::Linear, params.u.size(),
                               params.w.size());
  return unconstrain(layout, flatten(params));
}

UnconstrainedVector unconstrain(const MixtureParams& params) {
  const ParameterLayout layout(ModelKind::Mixture, params.u.size(),
                               params.w.size());
  return unconstrain(layout, flatten(params));
}

double lognormal_lpdf(double y, double mu, double sigma) noexcept {
  const double log_y = std::log(y);
  const double r = (log_y - mu) / sigma;
  return -log_y - std::log(sigma) - kHalfLog2Pi - 0.5 * r * r;
}

double normal_lpdf(double x, double mu, double sigma) noexcept {
  const double r = (x - mu) / sigma;
  return -std::log(sigma) - kHalfLog2Pi - 0.5 * r * r;
}

double cauchy_lpdf(double x, double location, double scale) noexcept {
  const double r = (x - location) / scale;
  return -std::log(std::numbers::pi * scale) - std::log1p(r * r);
}

double half_cauchy_lpdf(double x, double scale) noexcept {
  if (x < 0.0) return -std::numeric_limits<double>::infinity();
  const double r = x / scale;
  return std::log(2.0 / (std::numbers::pi * scale)) - std::log1p(r * r);
}

double log_sum_exp(double a, double b) noexcept {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

double linear_pointwise_loglik(const LinearParams& p, const Trial& trial,
                               double x) {
  check_indices(trial, p.u.size(), p.w.size());
  const double mu = p.beta0 + p.beta1 * x + p.u[trial.participant] + p.w[trial.item];
  return checked(lognormal_lpdf(trial.rt_ms, mu, p.sigma_e), "log likelihood");
}

double mixture_pointwise_loglik(const MixtureParams& p, const Trial& trial) {
  check_indices(trial, p.u.size(), p.w.size());
  const double weight =
      trial.condition == Condition::SubjectRelative ? p.p_sr : p.p_or;
  if (!(weight >= 0.0 && weight <= 1.0))
    throw DomainError("mixing probability outside [0, 1]");
  const double mu = p.beta + p.u[trial.participant] + p.w[trial.item];
  const double success = lognormal_lpdf(trial.rt_ms, mu, p.sigma_e);
  const double failure = lognormal_lpdf(trial.rt_ms, mu + p.delta, p.sigma_ep);
  double value;
  if (weight == 0.0)
    value = success;
  else if (weight == 1.0)
    value = failure;
  else
    value = log_sum_exp(std::log(weight) + failure, std::log1p(-weight) + success);
  return checked(value, "log likelihood");
}

double log_prior(const LinearParams& p) {
  require_positive(p.sigma_e, "sigma_e");
  require_positive(p.sigma_u, "sigma_u");
  require_positive(p.sigma_w, "sigma_w");
  double lp = cauchy_lpdf(p.beta0, 0.0, kPriorScale) +
              cauchy_lpdf(p.beta1, 0.0, kPriorScale) +
              half_cauchy_lpdf(p.sigma_e, kPriorScale) +
              half_cauchy_lpdf(p.sigma_u, kPriorScale) +
              half_cauchy_lpdf(p.sigma_w, kPriorScale);
  for (double u : p.u) lp += normal_lpdf(u, 0.0, p.sigma_u);
  for (double w : p.w) lp += normal_lpdf(w, 0.0, p.sigma_w);
  return lp;
}

double log_prior(const MixtureParams& p) {
  require_positive(p.delta, "delta");
  require_positive(p.sigma_e, "sigma_e");
  require_positive(p.sigma_ep, "sigma_e_prime");
  require_positive(p.sigma_u, "sigma_u");
  require_positive(p.sigma_w, "sigma_w");
  if (!(p.sigma_ep > p.sigma_e))
    throw DomainError("sigma_e_prime must exceed sigma_e");
  require_probability(p.p_sr, "p_sr");
  require_probability(p.p_or, "p_or");
  // Beta(1, 1) contributes log 1 = 0 for each probability.
  double lp = cauchy_lpdf(p.beta, 0.0, kPriorScale) +
              half_cauchy_lpdf(p.delta, kPriorScale) +
              half_cauchy_lpdf(p.sigma_e, kPriorScale) +
              half_cauchy_lpdf(p.sigma_ep, kPriorScale) +
              half_cauchy_lpdf(p.sigma_u, kPriorScale) +
              half_cauchy_lpdf(p.sigma_w, kPriorScale);
  for (double u : p.u) lp += normal_lpdf(u, 0.0, p.sigma_u);
  for (double w : p.w) lp += normal_lpdf(w, 0.0, p.sigma_w);
  return lp;
}

HierarchicalPosterior::HierarchicalPosterior(ModelKind kind,
                                             const Dataset& dataset)
    : layout_(kind, dataset.n_participants(), dataset.n_items()),
      mean_log_rt_(mean_log_rt(dataset)) {
  const std::size_t n = dataset.size();
  log_rt_.reserve(n);
  x_.reserve(n);
  participant_.reserve(n);
  item_.reserve(n);
  for (const Trial& t : dataset.trials()) {
    log_rt_.push_back(std::log(t.rt_ms));
    x_.push_back(sum_code(t.condition));
    participant_.push_back(t.participant);
    item_.push_back(t.item);
  }
}

double HierarchicalPosterior::log_density(std::span<const double> theta,
                                          std::span<double> grad) const {
  if (theta.size() != layout_.dimension())
    throw AlignmentError("parameter vector has the wrong length");
  if (!grad.empty()) {
    if (grad.size() != theta.size())
      throw AlignmentError("gradient buffer has the wrong length");
    std::fill(grad.begin(), grad.end(), 0.0);
  }
  return kind() == ModelKind::Linear ? linear(theta, grad) : mixture(theta, grad);
}

// Shared by both models: the non-centered random effects contribute
// N(z; 0, 1) each, which equals Normal(u; 0, sigma_u) times the Jacobian
// sigma_u of u = sigma_u * z.
double HierarchicalPosterior::linear(std::span<const double> th,
                                     std::span<double> g) const {
  const bool want = !g.empty();
  const std::size_t off_u = layout_.participant_offset();
  const std::size_t off_w = layout_.item_offset();

  const double b0 = th[0], b1 = th[1];
  const double sigma_e = std::exp(th[2]);
  const double sigma_u = std::exp(th[3]);
  const double sigma_w = std::exp(th[4]);
  const double log_sigma_e = th[2];

  double lp = 0.0;
  for (std::size_t n = 0; n < log_rt_.size(); ++n) {
    const double zu = th[off_u + participant_[n]];
    const double zw = th[off_w + item_[n]];
    const double mu = b0 + b1 * x_[n] + sigma_u * zu + sigma_w * zw;
    const double r = (log_rt_[n] - mu) / sigma_e;
    lp += -log_rt_[n] - log_sigma_e - kHalfLog2Pi - 0.5 * r * r;
    if (want) {
      const double d_mu = r / sigma_e;
      g[0] += d_mu;
      g[1] += d_mu * x_[n];
      g[2] += r * r - 1.0;
      g[3] += d_mu * sigma_u * zu;
      g[4] += d_mu * sigma_w * zw;
      g[off_u + participant_[n]] += d_mu * sigma_u;
      g[off_w + item_[n]] += d_mu * sigma_w;
    }
  }

  double d[5] = {};
  lp += coefficient_prior(b0, &d[0]) + coefficient_prior(b1, &d[1]) +
        log_scale_prior(th[2], &d[2]) + log_scale_prior(th[3], &d[3]) +
        log_scale_prior(th[4], &d[4]);
  for (std::size_t i = off_u; i < th.size(); ++i) {
    lp += -kHalfLog2Pi - 0.5 * th[i] * th[i];
    if (want) g[i] -= th[i];
  }
  if (want)
    for (int i = 0; i < 5; ++i) g[i] += d[i];
  return lp;
}

double HierarchicalPosterior::mixture(std::span<const double> th,
                                      std::span<double> g) const {
  const bool want = !g.empty();
  const std::size_t off_u = layout_.participant_offset();
  const std::size_t off_w = layout_.item_offset();

  const double beta = th[0];
  const double delta = std::exp(th[1]);
  const double p[2] = {inv_logit(th[2]), inv_logit(th[3])};
  const double log_p[2] = {log_inv_logit(th[2]), log_inv_logit(th[3])};
  const double log_q[2] = {log_inv_logit(-th[2]), log_inv_logit(-th[3])};
  const double log_sigma_e = th[4];
  const double sigma_e = std::exp(log_sigma_e);
  const double excess = std::exp(th[5]);
  const double sigma_ep = sigma_e + excess;
  const double log_sigma_ep = std::log(sigma_ep);
  const double sigma_u = std::exp(th[6]);
  const double sigma_w = std::exp(th[7]);

  double lp = 0.0;
  for (std::size_t n = 0; n < log_rt_.size(); ++n) {
    const int c = x_[n] < 0.0 ? 0 : 1;  // 0: subject relative
    const double zu = th[off_u + participant_[n]];
    const double zw = th[off_w + item_[n]];
    const double mu = beta + sigma_u * zu + sigma_w * zw;
    const double rs = (log_rt_[n] - mu) / sigma_e;
    const double rf = (log_rt_[n] - mu - delta) / sigma_ep;
    const double base = -log_rt_[n] - kHalfLog2Pi;
    const double a = log_p[c] + base - log_sigma_ep - 0.5 * rf * rf;
    const double b = log_q[c] + base - log_sigma_e - 0.5 * rs * rs;
    const double ll = log_sum_exp(a, b);
    lp += ll;
    if (want) {
      const double gamma = std::exp(a - ll);  // failure responsibility
      const double d_fail = gamma * rf / sigma_ep;
      const double d_mu = d_fail + (1.0 - gamma) * rs / sigma_e;
      g[0] += d_mu;
      g[1] += d_fail * delta;
      g[2 + c] += gamma - p[c];
      // d/d(log sigma_ep); chained onto both scale coordinates below.
      const double d_log_sep = gamma * (rf * rf - 1.0);
      g[4] += (1.0 - gamma) * (rs * rs - 1.0) + d_log_sep * sigma_e / sigma_ep;
      g[5] += d_log_sep * excess / sigma_ep;
      g[6] += d_mu * sigma_u * zu;
      g[7] += d_mu * sigma_w * zw;
      g[off_u + participant_[n]] += d_mu * sigma_u;
      g[off_w + item_[n]] += d_mu * sigma_w;
    }
  }

  double d[8] = {};
  lp += coefficient_prior(beta, &d[0]) + log_scale_prior(th[1], &d[1]) +
        probability_prior(th[2], &d[2]) + probability_prior(th[3], &d[3]) +
        log_scale_prior(th[4], &d[4]) + log_scale_prior(th[6], &d[6]) +
        log_scale_prior(th[7], &d[7]);
  // Half-Cauchy on sigma_ep, Jacobian exp(th[5]) of the ordered transform.
  {
    const double s2 = kPriorScale * kPriorScale;
    const double d_prior = -2.0 * sigma_ep / (s2 + sigma_ep * sigma_ep);
    lp += half_cauchy_lpdf(sigma_ep, kPriorScale) + th[5];
    d[4] += d_prior * sigma_e;
    d[5] = d_prior * excess + 1.0;
  }
  for (std::size_t i = off_u; i < th.size(); ++i) {
    lp += -kHalfLog2Pi - 0.5 * th[i] * th[i];
    if (want) g[i] -= th[i];
  }
  if (want)
    for (int i = 0; i < 8; ++i) g[i] += d[i];
  return lp;
}

void HierarchicalPosterior::constrain(std::span<const double> theta,
                                      std::span<double> out) const {
  const auto values = rtmix::constrain(layout_, theta);
  std::copy(values.begin(), values.end(), out.begin());
}

void HierarchicalPosterior::initialize(Rng& rng, std::span<double> theta) const {
  LogDensity::initialize(rng, theta);
  theta[0] = mean_log_rt_;
}

namespace {

// Locates the coordinate responsible for a non-finite density: a non-finite
// input, a transform that saturated, or failing that the first non-finite
// gradient entry.
std::optional<std::size_t> offending_coordinate(
    const HierarchicalPosterior& posterior, std::span<const double> theta) {
  const ParameterLayout& layout = posterior.layout();
  for (std::size_t i = 0; i < theta.size(); ++i)
    if (!std::isfinite(theta[i])) return i;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const Transform t = layout.transforms()[i];
    if (t == Transform::Log || t == Transform::OrderedScale) {
      const double v = std::exp(theta[i]);
      if (v == 0.0 || !std::isfinite(v)) return i;
    } else if (t == Transform::Logit) {
      const double v = inv_logit(theta[i]);
      if (v == 0.0 || v == 1.0) return i;
    }
  }
  std::vector<double> grad(theta.size());
  posterior.log_density(theta, grad);
  for (std::size_t i = 0; i < grad.size(); ++i)
    if (!std::isfinite(grad[i])) return i;
  return std::nullopt;
}

}  // namespace

double log_posterior(ModelKind kind, std::span<const double> theta,
                     const Dataset& dataset) {
  const HierarchicalPosterior posterior(kind, dataset);
  const double lp = posterior.log_density(theta, {});
  if (!std::isfinite(lp))
    throw NumericalError("non-finite log posterior",
                         offending_coordinate(posterior, theta));
  return lp;
}

std::vector<double> grad_log_posterior(ModelKind kind,
                                       std::span<const double> theta,
                                       const Dataset& dataset) {
  const HierarchicalPosterior posterior(kind, dataset);
  std::vector<double> grad(theta.size());
  const double lp = posterior.log_density(theta, grad);
  if (!std::isfinite(lp))
    throw NumericalError("non-finite log posterior",
                         offending_coordinate(posterior, theta));
  for (std::size_t i = 0; i < grad.size(); ++i)
    if (!std::isfinite(grad[i]))
      throw NumericalError("non-finite gradient", i);
  return grad;
}

UnconstrainedVector init_point(ModelKind kind, const Dataset& dataset,
                               std::uint64_t seed) {
  const HierarchicalPosterior posterior(kind, dataset);
  Rng rng(seed);
  UnconstrainedVector theta(posterior.dimension());
  posterior.initialize(rng, theta);
  return theta;
}

}  // namespace rtmix
