#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rtmix/crossval.hpp"
#include "rtmix/error.hpp"
#include "rtmix/simulate.hpp"
#include "support.hpp"

using namespace rtmix;
using test::rel_err;

TEST_CASE("log mean exp") {
  CHECK(log_mean_exp(std::vector<double>{0.0, 0.0}) == 0.0);
  CHECK(log_mean_exp(std::vector<double>{-1000.0, -1000.0}) == -1000.0);
  CHECK(log_mean_exp(std::vector<double>(7, 3.25)) == 3.25);
  CHECK(rel_err(log_mean_exp(std::vector<double>{0.0, std::log(3.0)}), std::log(2.0)) < 1e-15);
  CHECK_THROWS_AS(log_mean_exp(std::vector<double>{}), DomainError);
  CHECK(log_mean_exp(std::vector<double>{-INFINITY, 0.0}) ==
        doctest::Approx(-std::log(2.0)).epsilon(1e-15));

  std::mt19937_64 rng(1);
  for (double scale : {1.0, 50.0, 700.0}) {
    std::uniform_real_distribution<double> unif(-scale, scale);
    for (int k = 0; k < 200; ++k) {
      std::vector<double> v(1 + k % 40);
      for (double& x : v) x = unif(rng);
      const double got = log_mean_exp(v);
      CHECK(rel_err(got, static_cast<double>(test::ld_log_mean_exp(v))) < 1e-12);

      const double c = unif(rng);
      std::vector<double> shifted = v;
      for (double& x : shifted) x += c;
      const long double want = test::ld_log_mean_exp(shifted);
      CHECK(rel_err(log_mean_exp(shifted), static_cast<double>(want)) < 1e-12);
    }
  }
}

TEST_CASE("reports and comparisons") {
  SUBCASE("constant pointwise") {
    const ElpdReport r = make_report("m", std::vector<double>(9, -4.5));
    CHECK(r.total == -40.5);
    CHECK(r.se_total == 0.0);
  }
  SUBCASE("se of a known vector") {
    const ElpdReport r = make_report("m", {1.0, 2.0, 3.0, 4.0});
    // n = 4, sample variance 5/3
    CHECK(r.total == 10.0);
    CHECK(rel_err(r.se_total, std::sqrt(4.0 * 5.0 / 3.0)) < 1e-15);
  }
  SUBCASE("difference [1, -1]") {
    const ElpdReport a = make_report("a", {1.0, -1.0});
    const ElpdReport b = make_report("b", {0.0, 0.0});
    const ElpdComparison c = compare(a, b);
    CHECK(c.diff == 0.0);
    CHECK(c.se_diff == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(c.pointwise_diff == std::vector<double>{1.0, -1.0});
    CHECK(c.winner() == "tie");
  }
  SUBCASE("self comparison") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z(-6.0, 1.0);
    std::vector<double> v(50);
    for (double& x : v) x = z(rng);
    const ElpdReport r = make_report("m", v);
    const ElpdComparison c = compare(r, r);
    CHECK(c.diff == 0.0);
    CHECK(c.se_diff == 0.0);
  }
  SUBCASE("diff is the sum of pointwise differences") {
    const ElpdReport a = make_report("mixture", {-5.0, -6.5, -4.0});
    const ElpdReport b = make_report("linear", {-5.5, -6.0, -4.75});
    const ElpdComparison c = compare(a, b);
    double s = 0.0;
    for (double d : c.pointwise_diff) s += d;
    CHECK(c.diff == s);
    CHECK(c.winner() == "mixture");
    CHECK(compare(b, a).winner() == "mixture");
  }
  SUBCASE("alignment") {
    CHECK_THROWS_AS(compare(make_report("a", {1.0}), make_report("b", {1.0, 2.0})),
                    AlignmentError);
    CHECK_THROWS_AS(compare(make_report("a", {1.0}, 7), make_report("b", {1.0}, 8)),
                    AlignmentError);
  }
}

TEST_CASE("pointwise elpd against mean of exponentials") {
  const Dataset d = gen_mixture(MixtureTruth{}, DesignSpec{3, 4, 5}).dataset;
  const ParameterLayout layout(ModelKind::Mixture, 3, 4);
  PosteriorDraws draws(layout.names(), 2, 100);
  std::mt19937_64 rng(6);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < 100; ++i) {
      const auto theta = test::random_theta(layout, 5.9, rng);
      const auto row = constrain(layout, theta);
      std::copy(row.begin(), row.end(), draws.row(c, i).begin());
    }
  const std::vector<std::size_t> heldout{0, 3, 5, 8, 11};
  const auto got = pointwise_elpd(d, heldout, draws, ModelKind::Mixture);
  REQUIRE(got.size() == 5);
  for (std::size_t h = 0; h < heldout.size(); ++h) {
    const Trial& t = d[heldout[h]];
    long double s = 0.0L;
    for (std::size_t k = 0; k < draws.total_draws(); ++k) {
      const MixtureParams p = mixture_from_flat(draws.row(k), 3, 4);
      const long double prob = t.condition == Condition::SubjectRelative ? p.p_sr : p.p_or;
      s += std::exp(test::ld_mixture(t.rt_ms, prob, p.beta, p.delta, p.sigma_e, p.sigma_ep,
                                     static_cast<long double>(p.u[t.participant]) + p.w[t.item]));
    }
    const long double want = std::log(s / draws.total_draws());
    CHECK(rel_err(got[h], static_cast<double>(want)) < 1e-12);
  }
}

TEST_CASE("pointwise elpd rejects non-finite draws") {
  const Dataset d = test::grid_dataset(2, 2, 1);
  const ParameterLayout layout(ModelKind::Linear, 2, 2);
  PosteriorDraws draws(layout.names(), 1, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    auto row = draws.row(0, i);
    std::fill(row.begin(), row.end(), 0.0);
    row[0] = 6.0;
    row[2] = row[3] = row[4] = 0.5;
  }
  draws.row(0, 2)[0] = NAN;
  const std::vector<std::size_t> heldout{1};
  try {
    pointwise_elpd(d, heldout, draws, ModelKind::Linear);
    FAIL("expected a numerical error");
  } catch (const NumericalError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("trial 1") != std::string::npos);
    CHECK(msg.find("draw 2") != std::string::npos);
  }
}

TEST_CASE("leave-one-out on a 12-trial toy dataset") {
  const Dataset d = test::grid_dataset(3, 4, 9);
  const FoldPlan plan = make_folds(d, 12, 1);
  SamplerConfig c;
  c.n_chains = 2;
  c.n_warmup = 150;
  c.n_samples = 100;
  c.seed = 3;
  const ElpdReport r = run_kfold(ModelKind::Linear, d, plan, c);
  CHECK(r.pointwise.size() == 12);
  double s = 0.0;
  for (double v : r.pointwise) {
    CHECK(std::isfinite(v));
    s += v;
  }
  CHECK(r.total == s);
  CHECK(r.plan_fingerprint == plan.fingerprint());
  CHECK(r.model == "linear");
}

TEST_CASE("fold execution order does not change the report") {
  const Dataset d = test::grid_dataset(4, 5, 10);
  const FoldPlan plan = make_folds(d, 4, 2);
  SamplerConfig c;
  c.n_chains = 2;
  c.n_warmup = 100;
  c.n_samples = 80;
  for (ModelKind kind : {ModelKind::Linear, ModelKind::Mixture}) {
    const ElpdReport forward = run_kfold(kind, d, plan, c);
    const std::vector<std::size_t> order{3, 1, 0, 2};
    const ElpdReport shuffled = run_kfold(kind, d, plan, c, order);
    CHECK(forward.pointwise == shuffled.pointwise);
    CHECK(forward.total == shuffled.total);
    CHECK(forward.se_total == shuffled.se_total);
    CHECK(forward.warnings == shuffled.warnings);
  }
}

TEST_CASE("fold errors carry the fold number") {
  const FoldError e(3, "no finite starting point");
  CHECK(e.kind() == ErrorKind::Fold);
  CHECK(std::string(e.what()).find("fold 3") != std::string::npos);
}
