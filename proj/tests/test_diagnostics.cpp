#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "rtmix/diagnostics.hpp"
#include "rtmix/error.hpp"

using namespace rtmix;

namespace {

ChainSet iid_chains(std::size_t chains, std::size_t n, std::uint64_t seed,
                    double offset_step = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  ChainSet out(chains, std::vector<double>(n));
  for (std::size_t c = 0; c < chains; ++c)
    for (double& v : out[c]) v = z(rng) + offset_step * static_cast<double>(c);
  return out;
}

ChainSet ar1_chains(std::size_t chains, std::size_t n, double rho, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  const double innov = std::sqrt(1.0 - rho * rho);
  ChainSet out(chains, std::vector<double>(n));
  for (auto& chain : out) {
    double x = z(rng);
    for (double& v : chain) {
      x = rho * x + innov * z(rng);
      v = x;
    }
  }
  return out;
}

// Split R-hat written out directly from its definition.
double hand_rhat(const ChainSet& chains) {
  std::vector<std::vector<double>> halves;
  for (const auto& c : chains) {
    const std::size_t h = c.size() / 2;
    halves.emplace_back(c.begin(), c.begin() + h);
    halves.emplace_back(c.end() - h, c.end());
  }
  const double m = static_cast<double>(halves.size());
  const double n = static_cast<double>(halves[0].size());
  std::vector<double> means;
  double w = 0.0;
  for (const auto& h : halves) {
    double s = 0.0;
    for (double v : h) s += v;
    const double mu = s / n;
    means.push_back(mu);
    double ss = 0.0;
    for (double v : h) ss += (v - mu) * (v - mu);
    w += ss / (n - 1.0);
  }
  w /= m;
  double grand = 0.0;
  for (double mu : means) grand += mu;
  grand /= m;
  double b = 0.0;
  for (double mu : means) b += (mu - grand) * (mu - grand);
  b *= n / (m - 1.0);
  return std::sqrt(((n - 1.0) / n * w + b / n) / w);
}

}  // namespace

TEST_CASE("split R-hat") {
  SUBCASE("iid chains") {
    const ChainSet c = iid_chains(4, 1000, 1);
    CHECK(split_rhat(c) < 1.01);
    CHECK(split_rhat(c) >= 0.999);
    CHECK(split_rhat(c) == doctest::Approx(hand_rhat(c)).epsilon(1e-12));
  }
  SUBCASE("offset chains") {
    const ChainSet c = iid_chains(2, 500, 2, 10.0);
    CHECK(split_rhat(c) > 2.0);
    CHECK(split_rhat(c) == doctest::Approx(hand_rhat(c)).epsilon(1e-12));
  }
  SUBCASE("constant chains") {
    const ChainSet c(4, std::vector<double>(100, 3.0));
    CHECK(split_rhat(c) == std::numeric_limits<double>::infinity());
  }
  SUBCASE("bad shapes") {
    CHECK_THROWS_AS(split_rhat(ChainSet{}), DomainError);
    CHECK_THROWS_AS(split_rhat(ChainSet{{1.0, 2.0, 3.0}}), DomainError);
    CHECK_THROWS_AS(split_rhat(ChainSet{{1, 2, 3, 4}, {1, 2, 3, 4, 5}}), DomainError);
  }
}

TEST_CASE("effective sample size") {
  SUBCASE("iid") {
    const ChainSet c = iid_chains(4, 1000, 3);
    CHECK(effective_sample_size(c) == doctest::Approx(4000.0).epsilon(0.2));
  }
  SUBCASE("AR(1) with rho 0.9") {
    const double rho = 0.9;
    const ChainSet c = ar1_chains(4, 5000, rho, 4);
    const double want = 20000.0 * (1.0 - rho) / (1.0 + rho);
    CHECK(effective_sample_size(c) == doctest::Approx(want).epsilon(0.3));
  }
  SUBCASE("constant chain") {
    CHECK(effective_sample_size(ChainSet(2, std::vector<double>(50, 1.0))) == 0.0);
  }
}

TEST_CASE("diagnose collects per-chain divergences and warnings") {
  PosteriorDraws draws({"a", "b"}, 2, 10);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < 10; ++i) {
      draws.row(c, i)[0] = z(rng);
      draws.row(c, i)[1] = z(rng);
    }
  draws.chain_info.resize(2);
  draws.chain_info[0].divergences = 0;
  draws.chain_info[1].divergences = 2;
  const Diagnostics d = diagnose(draws);
  CHECK(d.names == std::vector<std::string>{"a", "b"});
  CHECK(d.divergences == std::vector<std::size_t>{0, 2});
  REQUIRE(d.warnings.size() == 1);
  CHECK(d.warnings[0].find("chain 2") != std::string::npos);
}
