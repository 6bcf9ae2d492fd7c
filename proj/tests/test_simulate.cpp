#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "rtmix/error.hpp"
#include "rtmix/format.hpp"
#include "rtmix/simulate.hpp"
#include "support.hpp"

using namespace rtmix;

namespace {

std::vector<double> log_rts(const Dataset& d, std::optional<Condition> only = {}) {
  std::vector<double> v;
  for (const Trial& t : d.trials())
    if (!only || t.condition == *only) v.push_back(std::log(t.rt_ms));
  return v;
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / a.size() -
                              static_cast<double>(j) / b.size()));
  }
  return d;
}

PosteriorDraws constant_draws(const std::vector<std::string>& names,
                              const std::vector<double>& values, std::size_t n) {
  PosteriorDraws draws(names, 1, n);
  for (std::size_t i = 0; i < n; ++i)
    std::copy(values.begin(), values.end(), draws.row(0, i).begin());
  return draws;
}

}  // namespace

TEST_CASE("design") {
  const Dataset d = gen_linear(LinearTruth{}, DesignSpec{37, 15, 1}).dataset;
  CHECK(d.size() == 555);
  CHECK(d.n_participants() == 37);
  CHECK(d.n_items() == 15);
  for (std::size_t p = 0; p < 37; ++p) {
    long sr = 0, orr = 0;
    for (const Trial& t : d.trials())
      if (t.participant == p) (t.condition == Condition::SubjectRelative ? sr : orr)++;
    CHECK(std::labs(sr - orr) <= 1);
  }
}

TEST_CASE("generators are seeded") {
  const DesignSpec a{6, 5, 3}, b{6, 5, 4};
  CHECK(log_rts(gen_mixture(MixtureTruth{}, a).dataset) ==
        log_rts(gen_mixture(MixtureTruth{}, a).dataset));
  CHECK(log_rts(gen_linear(LinearTruth{}, a).dataset) !=
        log_rts(gen_linear(LinearTruth{}, b).dataset));
}

TEST_CASE("vanishing noise leaves the linear predictor") {
  LinearTruth t;
  t.sigma_e = t.sigma_u = t.sigma_w = 1e-6;
  const Dataset d = gen_linear(t, DesignSpec{10, 8, 2}).dataset;
  for (const Trial& tr : d.trials())
    CHECK(std::fabs(std::log(tr.rt_ms) - (t.beta0 + t.beta1 * sum_code(tr.condition))) < 1e-4);
}

TEST_CASE("zero condition effect gives matching medians") {
  LinearTruth t;
  t.beta1 = 0.0;
  const Dataset d = gen_linear(t, DesignSpec{100, 100, 5}).dataset;
  const auto sr = log_rts(d, Condition::SubjectRelative);
  const auto orr = log_rts(d, Condition::ObjectRelative);
  // Both conditions share the same participants and items, so only the
  // trial noise separates the medians: sd of a median is about
  // 1.2533 sigma_e / sqrt(n) per condition.
  const double se = 1.2533 * t.sigma_e * std::sqrt(1.0 / sr.size() + 1.0 / orr.size());
  CHECK(std::fabs(quantile(sr, 0.5) - quantile(orr, 0.5)) < 4.0 * se);
}

TEST_CASE("zero mixing weights reproduce the linear generator") {
  MixtureTruth m;
  m.p_sr = m.p_or = 0.0;
  LinearTruth l;
  l.beta0 = m.beta;
  l.beta1 = 0.0;
  l.sigma_e = m.sigma_e;
  l.sigma_u = m.sigma_u;
  l.sigma_w = m.sigma_w;
  const DesignSpec design{12, 9, 8};
  const auto a = gen_mixture(m, design);
  CHECK(log_rts(a.dataset) == log_rts(gen_linear(l, design).dataset));
  CHECK(std::count(a.failure.begin(), a.failure.end(), 1) == 0);
}

TEST_CASE("collapsed mixture is a single lognormal") {
  MixtureTruth m;
  m.delta = 1e-12;
  m.sigma_ep = m.sigma_e = 0.5;
  m.sigma_u = m.sigma_w = 0.01;
  LinearTruth l;
  l.beta0 = m.beta;
  l.beta1 = 0.0;
  l.sigma_e = 0.5;
  l.sigma_u = l.sigma_w = 0.01;
  const auto a = log_rts(gen_mixture(m, DesignSpec{100, 100, 21}).dataset);
  const auto b = log_rts(gen_linear(l, DesignSpec{100, 100, 22}).dataset);
  const double n = static_cast<double>(a.size());
  const double critical = std::sqrt(-0.5 * std::log(0.01 / 2.0)) * std::sqrt(2.0 / n);
  CHECK(ks_statistic(a, b) < critical);
}

TEST_CASE("failure fraction is binomial") {
  const MixtureTruth m;
  const auto sim = gen_mixture(m, DesignSpec{100, 100, 9});
  double fail_sr = 0, n_sr = 0, fail_or = 0, n_or = 0;
  for (std::size_t i = 0; i < sim.dataset.size(); ++i) {
    if (sim.dataset[i].condition == Condition::SubjectRelative) {
      ++n_sr;
      fail_sr += sim.failure[i];
    } else {
      ++n_or;
      fail_or += sim.failure[i];
    }
  }
  CHECK(std::fabs(fail_sr / n_sr - m.p_sr) < 4.0 * std::sqrt(m.p_sr * (1 - m.p_sr) / n_sr));
  CHECK(std::fabs(fail_or / n_or - m.p_or) < 4.0 * std::sqrt(m.p_or * (1 - m.p_or) / n_or));
}

TEST_CASE("subject relatives are more spread out under the default mixture values") {
  const Dataset d = gen_mixture(MixtureTruth{}, DesignSpec{100, 100, 10}).dataset;
  const double sd_sr = std::sqrt(sample_variance(log_rts(d, Condition::SubjectRelative)));
  const double sd_or = std::sqrt(sample_variance(log_rts(d, Condition::ObjectRelative)));
  CHECK(sd_sr > sd_or);
}

TEST_CASE("generator input checks") {
  MixtureTruth m;
  m.delta = 0.0;
  CHECK_THROWS_AS(gen_mixture(m, DesignSpec{}), DomainError);
  LinearTruth l;
  l.sigma_e = -1.0;
  CHECK_THROWS_AS(gen_linear(l, DesignSpec{}), DomainError);
}

TEST_CASE("recovery check") {
  const std::vector<std::string> names{"a", "b"};
  PosteriorDraws draws(names, 2, 50);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < 50; ++i) {
      draws.row(c, i)[0] = static_cast<double>(c * 50 + i);  // 0..99
      draws.row(c, i)[1] = 1.0 + 0.01 * static_cast<double>(i);
    }
  SUBCASE("median covered, out of range not covered") {
    const RecoveryReport r = recovery_check({{"a", 49.5}, {"b", 5.0}}, draws);
    REQUIRE(r.parameters.size() == 2);
    CHECK(r.parameters[0].covered);
    CHECK(r.parameters[0].mean == doctest::Approx(49.5));
    CHECK(r.parameters[0].lower == doctest::Approx(quantile(draws.pooled(0), 0.025)));
    CHECK(r.parameters[0].upper == doctest::Approx(quantile(draws.pooled(0), 0.975)));
    CHECK_FALSE(r.parameters[1].covered);
    CHECK(r.coverage_rate == 0.5);
  }
  SUBCASE("interval bounds are inclusive") {
    const double lo = recovery_check({{"a", 0.0}}, draws).parameters[0].lower;
    const double hi = recovery_check({{"a", 0.0}}, draws).parameters[0].upper;
    CHECK(recovery_check({{"a", lo}}, draws).parameters[0].covered);
    CHECK(recovery_check({{"a", hi}}, draws).parameters[0].covered);
    CHECK_FALSE(recovery_check({{"a", std::nextafter(hi, 1e9)}}, draws).parameters[0].covered);
  }
  SUBCASE("unknown names") {
    CHECK_THROWS_AS(recovery_check({{"gamma", 1.0}}, draws), AlignmentError);
  }
}

TEST_CASE("posterior predictive summary structure") {
  const Dataset d = gen_linear(LinearTruth{}, DesignSpec{6, 6, 3}).dataset;
  const ParameterLayout layout(ModelKind::Linear, 6, 6);
  std::vector<double> row(layout.dimension(), 0.0);
  row[0] = 6.06;
  row[1] = -0.07;
  row[2] = 0.52;
  row[3] = 0.25;
  row[4] = 0.20;
  const PosteriorDraws draws = constant_draws(layout.names(), row, 20);

  SUBCASE("one replicate") {
    const PpcSummary s = posterior_predictive(draws, ModelKind::Linear, d, 1, 5);
    CHECK(s.replicates == 1);
    CHECK(s.statistics.size() == 6);
    CHECK(s.replicate_statistics.size() == 2);
    for (const auto& st : s.statistics) {
      CHECK(std::isfinite(st.observed));
      CHECK(st.replicate_lower == st.replicate_upper);
      CHECK(st.replicate_mean == st.replicate_lower);
    }
  }
  SUBCASE("observed statistics") {
    const PpcSummary s = posterior_predictive(draws, ModelKind::Linear, d, 30, 5);
    const auto obs = condition_statistics(d.trials());
    REQUIRE(obs.size() == 2);
    CHECK(s.statistics[0].observed == obs[0].median);
    CHECK(s.replicate_statistics.size() == 60);
    CHECK(posterior_predictive(draws, ModelKind::Linear, d, 30, 5).statistics[3].replicate_mean ==
          s.statistics[3].replicate_mean);
  }
}

TEST_CASE("linear fit to strongly mixed data misses the subject-relative spread") {
  MixtureTruth m;
  m.delta = 1.5;
  m.p_sr = 0.45;
  m.p_or = 0.05;
  m.sigma_e = 0.2;
  m.sigma_ep = 0.6;
  const Dataset d = gen_mixture(m, DesignSpec{30, 16, 4}).dataset;
  SamplerConfig c;
  c.n_chains = 2;
  c.n_warmup = 300;
  c.n_samples = 300;
  const PosteriorDraws draws = sample(ModelKind::Linear, d, c);
  const PpcSummary s = posterior_predictive(draws, ModelKind::Linear, d, 200, 3);
  bool flagged = false;
  for (const auto& st : s.statistics)
    if (st.condition == Condition::SubjectRelative && st.statistic == "log_sd") {
      flagged = st.extreme && st.observed > st.replicate_upper;
    }
  CHECK(flagged);
}
