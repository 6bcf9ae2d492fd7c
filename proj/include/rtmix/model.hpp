#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rtmix/data.hpp"
#include "rtmix/density.hpp"

namespace rtmix {

enum class ModelKind { Linear, Mixture };

std::string_view model_name(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model(std::string_view name);

// Scale of every Cauchy / half-Cauchy prior.
inline constexpr double kPriorScale = 2.5;

// Lognormal reading times with by-participant and by-item intercepts;
// location beta0 + beta1 * x + u[i] + w[j] on the log-ms scale.
struct LinearParams {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double sigma_e = 1.0;
  double sigma_u = 1.0;
  double sigma_w = 1.0;
  std::vector<double> u;
  std::vector<double> w;
};

// Two-component lognormal mixture. With probability p (p_sr or p_or by
// condition) a trial comes from the slow failure component centred delta
// above the success component. The components are identified by delta > 0
// and sigma_ep > sigma_e.
struct MixtureParams {
  double beta = 0.0;
  double delta = 1.0;
  double p_sr = 0.5;
  double p_or = 0.5;
  double sigma_e = 1.0;
  double sigma_ep = 2.0;
  double sigma_u = 1.0;
  double sigma_w = 1.0;
  std::vector<double> u;
  std::vector<double> w;
};

enum class Transform {
  Identity,
  Log,                // value = exp(x)
  Logit,              // value = 1 / (1 + exp(-x))
  OrderedScale,       // sigma_e_prime = sigma_e + exp(x)
  ParticipantEffect,  // u[i] = sigma_u * x  (non-centered)
  ItemEffect,         // w[j] = sigma_w * x
};

// Coordinate layout shared by unconstrained vectors and constrained draws.
//
//   linear:  beta0 beta1 sigma_e sigma_u sigma_w u[1..I] w[1..J]
//   mixture: beta delta p_sr p_or sigma_e sigma_e_prime sigma_u sigma_w
//            u[1..I] w[1..J]
//
// Unconstrained coordinates for u and w are the standard-normal deviates z;
// the constrained view exposes u = sigma_u * z and w = sigma_w * z. The
// mixture's sigma_e_prime coordinate is log(sigma_e_prime - sigma_e).
class ParameterLayout {
 public:
  ParameterLayout(ModelKind kind, std::size_t n_participants,
                  std::size_t n_items);

  ModelKind kind() const noexcept { return kind_; }
  std::size_t n_participants() const noexcept { return n_participants_; }
  std::size_t n_items() const noexcept { return n_items_; }
  std::size_t dimension() const noexcept { return names_.size(); }
  std::size_t n_population() const noexcept;
  std::size_t participant_offset() const noexcept { return n_population(); }
  std::size_t item_offset() const noexcept {
    return n_population() + n_participants_;
  }
  std::size_t sigma_u_index() const noexcept;
  std::size_t sigma_w_index() const noexcept;

  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<Transform>& transforms() const noexcept {
    return transforms_;
  }

  // Throws AlignmentError for unknown names.
  std::size_t index_of(std::string_view name) const;

 private:
  ModelKind kind_;
  std::size_t n_participants_;
  std::size_t n_items_;
  std::vector<std::string> names_;
  std::vector<Transform> transforms_;
};

// Unconstrained vectors are plain std::vector<double> in the layout above.
using UnconstrainedVector = std::vector<double>;

std::vector<double> constrain(const ParameterLayout& layout,
                              std::span<const double> theta);
UnconstrainedVector unconstrain(const ParameterLayout& layout,
                                std::span<const double> constrained);

LinearParams linear_from_flat(std::span<const double> constrained,
                              std::size_t n_participants, std::size_t n_items);
MixtureParams mixture_from_flat(std::span<const double> constrained,
                                std::size_t n_participants, std::size_t n_items);
std::vector<double> flatten(const LinearParams& params);
std::vector<double> flatten(const MixtureParams& params);

LinearParams constrain_linear(std::span<const double> theta,
                              std::size_t n_participants, std::size_t n_items);
MixtureParams constrain_mixture(std::span<const double> theta,
                                std::size_t n_participants, std::size_t n_items);
UnconstrainedVector unconstrain(const LinearParams& params);
UnconstrainedVector unconstrain(const MixtureParams& params);

// Log density of LogNormal(mu, sigma) at y > 0.
double lognormal_lpdf(double y, double mu, double sigma) noexcept;
double normal_lpdf(double x, double mu, double sigma) noexcept;
double cauchy_lpdf(double x, double location, double scale) noexcept;
double half_cauchy_lpdf(double x, double scale) noexcept;

// log(exp(a) + exp(b)) without overflow.
double log_sum_exp(double a, double b) noexcept;

// x is the sum-coded condition of the trial.
double linear_pointwise_loglik(const LinearParams& params, const Trial& trial,
                               double x);
// Mixing weight p_sr or p_or by condition; a weight of exactly 0 or 1 reduces
// to the single remaining component.
double mixture_pointwise_loglik(const MixtureParams& params, const Trial& trial);

double log_prior(const LinearParams& params);
double log_prior(const MixtureParams& params);

// Log posterior on the unconstrained scale: likelihood + prior + log
// Jacobian of every transform. Throws NumericalError on non-finite results.
double log_posterior(ModelKind kind, std::span<const double> theta,
                     const Dataset& dataset);
std::vector<double> grad_log_posterior(ModelKind kind,
                                       std::span<const double> theta,
                                       const Dataset& dataset);

// The posterior of either model as a LogDensity. Holds a precomputed copy
// of the trial data, so the Dataset need not outlive it.
class HierarchicalPosterior final : public LogDensity {
 public:
  HierarchicalPosterior(ModelKind kind, const Dataset& dataset);

  const ParameterLayout& layout() const noexcept { return layout_; }
  ModelKind kind() const noexcept { return layout_.kind(); }

  std::size_t dimension() const override { return layout_.dimension(); }
  double log_density(std::span<const double> theta,
                     std::span<double> grad) const override;
  std::vector<std::string> coordinate_names() const override {
    return layout_.names();
  }
  void constrain(std::span<const double> theta,
                 std::span<double> out) const override;
  // Uniform on [-2, 2] except the intercept, which starts at the mean log rt.
  void initialize(Rng& rng, std::span<double> theta) const override;

 private:
  double linear(std::span<const double> theta, std::span<double> grad) const;
  double mixture(std::span<const double> theta, std::span<double> grad) const;

  ParameterLayout layout_;
  double mean_log_rt_;
  std::vector<double> log_rt_;
  std::vector<double> x_;
  std::vector<std::size_t> participant_;
  std::vector<std::size_t> item_;
};

UnconstrainedVector init_point(ModelKind kind, const Dataset& dataset,
                               std::uint64_t seed);

}  // namespace rtmix
