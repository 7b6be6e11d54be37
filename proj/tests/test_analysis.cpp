#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracle.hpp"
#include "ppsim/analysis.hpp"
#include "ppsim/rng.hpp"
#include "ppsim/stats.hpp"

using namespace ppsim;
using namespace ppsim::analysis;
using doctest::Approx;

namespace {

CountryConfig symmetric(std::size_t n) {
  ConfigData d;
  d.initial_indicators.assign(n, 0.3);
  d.targets.assign(n, 0.7);
  d.adjacency = Matrix::square(n);
  for (std::size_t i = 0; i < n; ++i) d.adjacency(i, (i + 1) % n) = 0.4;
  d.budget = 0.6;
  d.gamma = 2.0;
  d.rule_of_law_idx = 0;
  d.control_of_corruption_idx = 0;
  d.max_periods = 300;
  return CountryConfig::create(d);
}

RunResult with_diversion(Vector per_issue) {
  RunResult r;
  r.corruption = std::accumulate(per_issue.begin(), per_issue.end(), 0.0);
  r.per_issue_diversion = std::move(per_issue);
  return r;
}

}  // namespace

TEST_CASE("mean, variance, quantiles") {
  const std::vector<double> s{1, 2, 3};
  CHECK(stats::mean(s) == 2.0);
  CHECK(stats::sample_variance(s) == 1.0);
  CHECK(stats::quantile(s, 0.5) == 2.0);
  CHECK(stats::quantile(s, 0.25) == 1.5);
  CHECK(stats::quantile(s, 0.0) == 1.0);
  CHECK(stats::quantile(s, 1.0) == 3.0);
  const std::vector<double> unsorted{10, 0, 5, 7};
  CHECK(stats::quantile(unsorted, 0.75) == Approx(7.75));
  CHECK(stats::quantile(std::vector<double>{4.0}, 0.3) == 4.0);
  CHECK_THROWS(stats::quantile(std::vector<double>{}, 0.5));
  CHECK_THROWS(stats::quantile(s, 1.5));
}

TEST_CASE("Welch test on textbook samples") {
  // Reference values from an independent implementation (scipy.stats.ttest_ind,
  // equal_var=False): t = -4.9295030175464960, df = 6, p = 0.0026315296364946626.
  const std::vector<double> a{2.1, 2.5, 2.3, 2.7}, b{3.0, 3.4, 3.2, 3.6};
  const auto w = stats::welch_t_test(a, b);
  CHECK(w.t == Approx(-4.929503017546496).epsilon(1e-12));
  CHECK(w.df == Approx(6.0).epsilon(1e-12));
  CHECK(w.p == Approx(0.0026315296364946626).epsilon(1e-9));
  CHECK(w.p < 0.01);
}

TEST_CASE("Welch test with unequal variances and sizes") {
  // scipy.stats.ttest_ind([1,4,2,8,5,7], [10,12,9], equal_var=False)
  const std::vector<double> a{1, 4, 2, 8, 5, 7}, b{10, 12, 9};
  const auto w = stats::welch_t_test(a, b);
  const double va = stats::sample_variance(a) / 6, vb = stats::sample_variance(b) / 3;
  CHECK(w.t == Approx((stats::mean(a) - stats::mean(b)) / std::sqrt(va + vb)).epsilon(1e-13));
  CHECK(w.df == Approx((va + vb) * (va + vb) / (va * va / 5 + vb * vb / 2)).epsilon(1e-13));
  CHECK(w.p == Approx(0.005066218306470634).epsilon(1e-8));
}

TEST_CASE("Welch test degenerate cases") {
  const std::vector<double> same{1, 1, 1};
  CHECK(stats::welch_t_test(same, same).p == 1.0);
  const auto w = stats::welch_t_test(same, std::vector<double>{2, 2, 2});
  CHECK(w.p == 0.0);
  CHECK(std::isinf(w.t));
  CHECK_THROWS(stats::welch_t_test(std::vector<double>{1}, same));
}

TEST_CASE("PillarMap") {
  const PillarMap m({"a", "b", "a", "c"});
  CHECK(m.pillars() == std::vector<std::string>{"a", "b", "c"});
  CHECK(m.pillar_index(2) == 0);
  CHECK(m.pillar_size(0) == 2);
  std::vector<std::string> many;
  for (int k = 0; k < 14; ++k) many.push_back("p" + std::to_string(k));
  CHECK_THROWS(PillarMap(many));
  CHECK_THROWS(PillarMap({"a", ""}));
}

TEST_CASE("pillar gains") {
  const std::vector<RunResult> bench{with_diversion({0.4, 0.1, 0.3}), with_diversion({0.6, 0.3, 0.1})};
  const std::vector<RunResult> alt{with_diversion({0.2, 0.1, 0.3}), with_diversion({0.2, 0.3, 0.1})};
  SUBCASE("single pillar equals total gain") {
    const auto g = pillar_gains(bench, alt, PillarMap({"all", "all", "all"}));
    CHECK(g.raw.size() == 1);
    CHECK(g.raw[0] == Approx(0.3));
    CHECK(g.per_indicator[0] == Approx(0.1));
  }
  SUBCASE("diversion confined to one pillar") {
    const auto g = pillar_gains(bench, alt, PillarMap({"p1", "p2", "p2"}));
    CHECK(g.raw[0] == Approx(0.3));
    CHECK(g.raw[1] == 0.0);
  }
  SUBCASE("no diversion anywhere") {
    const std::vector<RunResult> zero{with_diversion({0, 0, 0})};
    const auto g = pillar_gains(zero, zero, PillarMap({"a", "b", "a"}));
    CHECK(g.raw == Vector{0.0, 0.0});
  }
  CHECK_THROWS(pillar_gains(bench, alt, PillarMap({"a", "b"})));
}

TEST_CASE("ward clustering") {
  SUBCASE("k equal to the number of rows gives singletons") {
    Matrix f(4, 2);
    for (std::size_t i = 0; i < 4; ++i) f(i, 0) = static_cast<double>(i * i);
    CHECK(ward_clusters(f, 4) == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(ward_clusters(f, 1) == std::vector<std::size_t>{0, 0, 0, 0});
    CHECK_THROWS(ward_clusters(f, 5));
    CHECK_THROWS(ward_clusters(f, 0));
  }
  SUBCASE("well-separated blobs are separated") {
    std::mt19937_64 eng(3);
    std::normal_distribution<double> noise(0.0, 1.0);
    Matrix f(20, 3);
    for (std::size_t i = 0; i < 20; ++i)
      for (std::size_t k = 0; k < 3; ++k) f(i, k) = (i % 2 ? 10.0 : 0.0) + noise(eng);
    const auto labels = ward_clusters(f, 2);
    for (std::size_t i = 0; i < 20; ++i) CHECK(labels[i] == i % 2);
  }
  SUBCASE("hand-checked merge order") {
    // 1-D points 0, 1, 5, 6, 20: {0,1} and {5,6} merge first; joining the
    // pairs costs 2*2/4 * 5^2 = 25, adding 20 to {5,6} costs 2/3 * 14.5^2 = 140.
    Matrix f(5, 1);
    const double xs[] = {0, 1, 5, 6, 20};
    for (std::size_t i = 0; i < 5; ++i) f(i, 0) = xs[i];
    CHECK(ward_clusters(f, 3) == std::vector<std::size_t>{0, 0, 1, 1, 2});
    CHECK(ward_clusters(f, 2) == std::vector<std::size_t>{0, 0, 0, 0, 1});
  }
  SUBCASE("every requested cluster is non-empty") {
    std::mt19937_64 eng(9);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
      Matrix f(12, 4);
      for (std::size_t i = 0; i < 12; ++i)
        for (std::size_t k = 0; k < 4; ++k) f(i, k) = u(eng);
      for (std::size_t k = 1; k <= 12; ++k) {
        const auto labels = ward_clusters(f, k);
        std::vector<std::size_t> counts(k, 0);
        for (auto l : labels) counts.at(l)++;
        for (auto c : counts) CHECK(c > 0);
      }
    }
  }
}

TEST_CASE("discover_profile") {
  SUBCASE("one issue takes the whole budget") {
    ConfigData d;
    d.initial_indicators = {0.2};
    d.targets = {0.5};
    d.adjacency = Matrix::square(1);
    d.budget = 0.3;
    d.control_of_corruption_idx = 0;
    d.max_periods = 50;
    CHECK(discover_profile(CountryConfig::create(d), 5, 1) == Vector{0.3});
  }
  SUBCASE("larger gaps attract more budget") {
    ConfigData d;
    d.initial_indicators = {0.1, 0.1};
    d.targets = {0.7, 0.3};
    d.adjacency = Matrix::square(2);
    d.adjacency(0, 1) = 0.5;
    d.adjacency(1, 0) = 0.5;
    d.budget = 0.5;
    d.gamma = 1.0;
    d.rule_of_law_idx = 0;
    d.control_of_corruption_idx = 1;
    d.max_periods = 400;
    const auto p = discover_profile(CountryConfig::create(d), 200, 3);
    CHECK(p[0] > p[1]);
    CHECK(p[0] + p[1] == Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("output is a non-negative budget split, deterministic in the seed") {
    const auto cfg = symmetric(4);
    const auto p = discover_profile(cfg, 40, 11);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == Approx(0.6).epsilon(1e-12));
    for (double x : p) CHECK(x >= 0.0);
    CHECK(discover_profile(cfg, 40, 11) == p);
    DiscoveryOptions fin;
    fin.averaging = DiscoveryAveraging::FinalPeriod;
    const auto q = discover_profile(cfg, 40, 11, fin);
    CHECK(std::accumulate(q.begin(), q.end(), 0.0) == Approx(0.6).epsilon(1e-12));
  }
  CHECK_THROWS(discover_profile(symmetric(3), 0, 1));
}

TEST_CASE("evaluate_regimes") {
  const auto cfg = symmetric(4);
  const auto regimes = standard_regimes(Vector(4, 0.15), 0.6);
  REQUIRE(regimes.size() == 4);
  const auto st = evaluate_regimes(cfg, regimes, 40, 5);
  CHECK(st.regimes.size() == 4);
  CHECK(st.comparisons.size() == 3);
  for (const auto& s : st.regimes) {
    const auto [lo, hi] = std::minmax_element(s.samples.begin(), s.samples.end());
    for (double q : {s.p25, s.p50, s.p75, s.mean}) {
      CHECK(q >= *lo);
      CHECK(q <= *hi);
    }
    CHECK(s.p25 <= s.p50);
    CHECK(s.p50 <= s.p75);
  }
  for (const auto& c : st.comparisons) {
    CHECK(c.efficiency_gain == Approx(st.summary(RegimeKind::LaxUninformed).mean - st.summary(c.alternative).mean));
  }

  SUBCASE("benchmark against itself gains nothing") {
    const std::vector<PolicyRegime> twice{PolicyRegime::arbitrary(RegimeKind::LaxUninformed),
                                          PolicyRegime::arbitrary(RegimeKind::StrictUninformed)};
    auto ensembles = simulate_ensembles(cfg, twice, 30, 2);
    ensembles[1].runs = ensembles[0].runs;
    const auto s = summarize(ensembles);
    CHECK(s.comparisons[0].efficiency_gain == 0.0);
    CHECK(s.comparisons[0].welch.p == 1.0);
  }
  SUBCASE("benchmark is required") {
    CHECK_THROWS(evaluate_regimes(cfg, {PolicyRegime(RegimeKind::StrictInformed, Vector(4, 0.15), 0.6)}, 5, 1));
  }
  SUBCASE("identical inputs give identical statistics") {
    const auto again = evaluate_regimes(cfg, regimes, 40, 5);
    for (std::size_t k = 0; k < 4; ++k) CHECK(again.regimes[k].samples == st.regimes[k].samples);
  }
}

TEST_CASE("calibrate_gamma") {
  const auto cfg = symmetric(3);
  SUBCASE("single candidate is returned with its objective") {
    const auto r = calibrate_gamma({{cfg, 0.5}}, {0.7}, 10, 1);
    CHECK(r.gamma == 0.7);
    REQUIRE(r.grid.size() == 1);
    CHECK(r.grid[0].second == r.objective);
    const double sim = simulated_corruption_score(cfg.with_gamma(0.7), 10, 1, streams::kCalibration);
    CHECK(r.objective == Approx((sim - 0.5) * (sim - 0.5)).epsilon(1e-12));
  }
  SUBCASE("objective is finite at every grid point and the argmin is reported") {
    const std::vector<double> grid{0.5, 1.0, 2.0, 4.0};
    const auto r = calibrate_gamma({{cfg, 0.4}, {cfg.with_gamma(9.0), 0.8}}, grid, 8, 3);
    REQUIRE(r.grid.size() == grid.size());
    double best = INFINITY;
    for (const auto& [g, obj] : r.grid) {
      CHECK(std::isfinite(obj));
      best = std::min(best, obj);
    }
    CHECK(r.objective == best);
  }
  CHECK_THROWS(calibrate_gamma({{cfg, 0.5}}, {}, 10, 1));
  CHECK_THROWS(calibrate_gamma({{cfg, 0.5}}, {0.0, 1.0}, 10, 1));
}
