#include "rtmix/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rtmix/error.hpp"
#include "rtmix/format.hpp"

namespace rtmix {

namespace {

void check_chains(const ChainSet& chains) {
  if (chains.empty()) throw DomainError("no chains supplied");
  const std::size_t n = chains.front().size();
  if (n < 4) throw DomainError("need at least 4 draws per chain");
  for (const auto& c : chains)
    if (c.size() != n) throw DomainError("chains differ in length");
}

// Autocovariance at `lag` with divisor n.
double autocovariance(const std::vector<double>& x, double mean, std::size_t lag) {
  double s = 0.0;
  for (std::size_t t = 0; t + lag < x.size(); ++t)
    s += (x[t] - mean) * (x[t + lag] - mean);
  return s / static_cast<double>(x.size());
}

}  // namespace

double split_rhat(const ChainSet& chains) {
  check_chains(chains);
  const std::size_t half = chains.front().size() / 2;
  const std::size_t len = chains.front().size();
  std::vector<double> means, vars;
  for (const auto& c : chains) {
    for (int part = 0; part < 2; ++part) {
      const auto first = part == 0 ? c.begin() : c.begin() + (len - half);
      std::vector<double> piece(first, first + half);
      means.push_back(mean(piece));
      vars.push_back(sample_variance(piece));
    }
  }
  const double n = static_cast<double>(half);
  const double within = mean(vars);
  const double between = n * sample_variance(means);
  if (!(within > 0.0)) return std::numeric_limits<double>::infinity();
  const double var_plus = (n - 1.0) / n * within + between / n;
  return std::sqrt(var_plus / within);
}

double effective_sample_size(const ChainSet& chains) {
  check_chains(chains);
  const std::size_t m = chains.size();
  const std::size_t n = chains.front().size();

  std::vector<double> chain_mean(m), chain_var(m);
  for (std::size_t c = 0; c < m; ++c) {
    chain_mean[c] = mean(chains[c]);
    chain_var[c] = sample_variance(chains[c]);
  }
  const double mean_var = mean(chain_var);
  double var_plus = mean_var * (static_cast<double>(n) - 1.0) / static_cast<double>(n);
  if (m > 1) var_plus += sample_variance(chain_mean);
  if (!(var_plus > 0.0)) return 0.0;

  auto rho = [&](std::size_t lag) {
    double acov = 0.0;
    for (std::size_t c = 0; c < m; ++c)
      acov += autocovariance(chains[c], chain_mean[c], lag);
    acov /= static_cast<double>(m);
    // Chain variances above use n - 1; the lag-0 autocovariance uses n.
    return 1.0 - (mean_var * (static_cast<double>(n) - 1.0) /
                      static_cast<double>(n) -
                  acov) /
                     var_plus;
  };

  // Geyer's initial positive sequence on consecutive pairs, made monotone.
  std::vector<double> r = {1.0, rho(1)};
  std::size_t t = 1;
  while (t + 2 < n) {
    const double even = rho(t + 1);
    const double odd = rho(t + 2);
    if (!(even + odd > 0.0)) break;
    r.push_back(even);
    r.push_back(odd);
    t += 2;
  }
  // r[0..t] holds pairs (r[0], r[1]), (r[2], r[3]), ...
  for (std::size_t k = 2; k + 1 <= t; k += 2) {
    const double prev = r[k - 2] + r[k - 1];
    if (r[k] + r[k + 1] > prev) {
      r[k] = prev / 2.0;
      r[k + 1] = prev / 2.0;
    }
  }
  double tau = -1.0;
  for (std::size_t k = 0; k <= t; ++k) tau += 2.0 * r[k];
  const double total = static_cast<double>(m * n);
  tau = std::max(tau, 1.0 / std::log10(total));
  return total / tau;
}

double Diagnostics::max_rhat() const {
  double worst = 0.0;
  for (double r : rhat) {
    if (std::isnan(r)) return r;
    worst = std::max(worst, r);
  }
  return worst;
}

Diagnostics diagnose(const PosteriorDraws& draws) {
  Diagnostics d;
  d.names = draws.names();
  for (std::size_t k = 0; k < draws.n_coordinates(); ++k) {
    const ChainSet chains = draws.per_chain(k);
    if (draws.n_samples() >= 4) {
      d.rhat.push_back(split_rhat(chains));
      d.ess.push_back(effective_sample_size(chains));
    } else {
      d.rhat.push_back(std::numeric_limits<double>::quiet_NaN());
      d.ess.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  for (std::size_t c = 0; c < draws.chain_info.size(); ++c) {
    const std::size_t div = draws.chain_info[c].divergences;
    d.divergences.push_back(div);
    if (draws.n_samples() > 0 &&
        static_cast<double>(div) > 0.1 * static_cast<double>(draws.n_samples()))
      d.warnings.push_back("chain " + std::to_string(c + 1) + ": " +
                           std::to_string(div) + " of " +
                           std::to_string(draws.n_samples()) +
                           " transitions diverged");
  }
  return d;
}

}  // namespace rtmix
