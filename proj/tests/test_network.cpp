#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boyer_myrvold_planar_test.hpp>

#include "ppsim/network.hpp"
#include "ppsim/rng.hpp"

using namespace ppsim;
using namespace ppsim::network;
using doctest::Approx;

namespace {

bool planar(std::size_t n, const std::vector<Edge>& edges) {
  boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS> g(n);
  for (const auto& e : edges) boost::add_edge(e.a, e.b, g);
  return boost::boyer_myrvold_planarity_test(g);
}

Matrix random_similarity(std::size_t n, std::mt19937_64& eng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix s = Matrix::square(n, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s(i, j) = s(j, i) = u(eng);
  return s;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    syy += y[k] * y[k];
    sxy += x[k] * y[k];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

IndicatorPanel panel_of(const std::vector<std::vector<double>>& cols) {
  Matrix m(cols.front().size(), cols.size());
  std::vector<std::string> labels;
  std::vector<int> years;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    labels.push_back("x" + std::to_string(c));
    for (std::size_t r = 0; r < cols[c].size(); ++r) m(r, c) = cols[c][r];
  }
  for (std::size_t r = 0; r < cols.front().size(); ++r) years.push_back(2000 + static_cast<int>(r));
  return IndicatorPanel(labels, years, m);
}

}  // namespace

TEST_CASE("IndicatorPanel checks its shape") {
  CHECK_THROWS(IndicatorPanel({"a"}, {1, 2}, Matrix(2, 1)));
  CHECK_THROWS(IndicatorPanel({"a", "b"}, {1, 2, 3}, Matrix(3, 1)));
  Matrix m(3, 1);
  m(1, 0) = std::nan("");
  CHECK_THROWS(IndicatorPanel({"a"}, {1, 2, 3}, m));
  const auto p = panel_of({{1, 2, 3}, {4, 5, 7}});
  CHECK(p.index_of("x1") == 1);
  CHECK_THROWS(p.index_of("zz"));
  CHECK(p.column(1) == std::vector<double>{4, 5, 7});
  CHECK(p.row(2) == std::vector<double>{3, 7});
}

TEST_CASE("impute_series") {
  const double na = std::nan("");
  std::vector<double> s{na, 1.0, na, 3.0, 4.0, na};
  CHECK(impute_series(s));
  CHECK(s == std::vector<double>{1.0, 1.0, 2.0, 3.0, 4.0, 4.0});
  std::vector<double> sparse{na, na, 1.0, na, 2.0, na, na};
  CHECK_FALSE(impute_series(sparse));
  std::vector<double> half{na, 2.0, na, 4.0};
  CHECK(impute_series(half));
  CHECK(half == std::vector<double>{2.0, 2.0, 3.0, 4.0});
}

TEST_CASE("correlation_matrix") {
  const auto p = panel_of({{1, 2, 4, 8, 3}, {-2, -4, -8, -16, -6}, {0.5, 0.1, 0.9, 0.3, 0.4}, {3, 1, 4, 1, 5}});
  const auto r = correlation_matrix(p);
  for (std::size_t i = 0; i < 4; ++i) CHECK(r(i, i) == Approx(1.0).epsilon(1e-15));
  CHECK(r(0, 1) == Approx(-1.0).epsilon(1e-14));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(r(i, j) == r(j, i));
      CHECK(std::abs(r(i, j) - pearson(p.column(i), p.column(j))) < 1e-12);
    }
  CHECK_THROWS(correlation_matrix(panel_of({{1, 2, 3}, {5, 5, 5}})));
}

TEST_CASE("tmfg on four vertices is K4") {
  std::mt19937_64 eng(1);
  const auto edges = tmfg(random_similarity(4, eng));
  CHECK(edges.size() == 6);
  CHECK_THROWS(tmfg(random_similarity(3, eng)));
}

TEST_CASE("tmfg edge count and planarity") {
  std::mt19937_64 eng(2024);
  for (std::size_t n : {5u, 10u, 17u, 30u}) {
    for (int k = 0; k < 5; ++k) {
      const auto edges = tmfg(random_similarity(n, eng));
      CHECK(edges.size() == 3 * (n - 2));
      std::set<std::pair<std::size_t, std::size_t>> unique;
      for (const auto& e : edges) {
        CHECK(e.a != e.b);
        unique.insert({std::min(e.a, e.b), std::max(e.a, e.b)});
      }
      CHECK(unique.size() == edges.size());
      CHECK(planar(n, edges));
    }
  }
}

TEST_CASE("tmfg is deterministic") {
  std::mt19937_64 eng(5);
  const auto s = random_similarity(12, eng);
  CHECK(tmfg(s) == tmfg(s));
}

TEST_CASE("tmfg picks the heaviest clique first and keeps intra-cluster edges") {
  // Two tight clusters {0,1,2,3} and {4,5,6,7}, weak links between them.
  Matrix s = Matrix::square(8, 0.05);
  for (std::size_t i = 0; i < 8; ++i) s(i, i) = 1.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (i != j) s(i, j) = 0.9;
  for (std::size_t i = 4; i < 8; ++i)
    for (std::size_t j = 4; j < 8; ++j)
      if (i != j) s(i, j) = 0.8;
  const auto edges = tmfg(s);
  REQUIRE(edges.size() == 18);
  std::size_t intra = 0;
  for (const auto& e : edges) intra += (e.a < 4) == (e.b < 4);
  // Both K4s survive; the remaining 6 edges are bridges.
  CHECK(intra == 12);
  std::set<std::pair<std::size_t, std::size_t>> first;
  for (std::size_t k = 0; k < 6; ++k) first.insert({std::min(edges[k].a, edges[k].b), std::max(edges[k].a, edges[k].b)});
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) CHECK(first.count({i, j}) == 1);
}

TEST_CASE("likelihood ratio is antisymmetric and zero on duplicates") {
  Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> x(30), y(30);
    for (std::size_t t = 0; t < 30; ++t) {
      x[t] = rng.laplace();
      y[t] = 0.5 * x[t] + rng.normal();
    }
    CHECK(std::abs(likelihood_ratio(x, y) + likelihood_ratio(y, x)) < 1e-12);
  }
  const std::vector<double> x{0.3, -1.2, 2.2, 0.1, -0.4};
  CHECK(likelihood_ratio(x, x) == 0.0);
}

TEST_CASE("likelihood ratio matches a hand evaluation") {
  const std::vector<double> x{1, 2, 3, 4, 10}, y{2, 1, 4, 3, 6};
  auto standardize = [](std::vector<double> v) {
    double m = 0;
    for (double a : v) m += a;
    m /= v.size();
    double s = 0;
    for (double a : v) s += (a - m) * (a - m);
    s = std::sqrt(s / v.size());
    for (double& a : v) a = (a - m) / s;
    return v;
  };
  const auto xs = standardize(x), ys = standardize(y);
  double rho = 0, a = 0, b = 0;
  for (std::size_t t = 0; t < 5; ++t) {
    rho += xs[t] * ys[t] / 5;
    a += xs[t] * std::tanh(ys[t]) / 5;
    b += std::tanh(xs[t]) * ys[t] / 5;
  }
  CHECK(likelihood_ratio(x, y) == Approx(rho * (a - b)).epsilon(1e-12));
}

TEST_CASE("orientation recovers a heavy-tailed cause") {
  int correct = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    Rng rng(derive_seed(31, 1, rep));
    std::vector<double> x(200), y(200);
    for (std::size_t t = 0; t < 200; ++t) {
      x[t] = rng.laplace();
      y[t] = 0.8 * x[t] + 0.6 * rng.laplace();
    }
    const auto net = orient_edges(panel_of({x, y}), {{0, 1}});
    correct += net.edges.at(0).source == 0;
  }
  CHECK(correct >= 80);
}

TEST_CASE("orient_edges assigns one direction per edge and breaks ties by label") {
  const std::vector<double> a{0.1, 0.5, -0.3, 0.9, 0.2};
  const auto p = panel_of({a, a, {3, 1, 4, 1, 5}});
  const auto net = orient_edges(p, {{1, 0}, {2, 0}});
  REQUIRE(net.edges.size() == 2);
  CHECK(net.edges[0].tie);
  CHECK(net.edges[0].source == 0);  // "x0" < "x1"
  CHECK(net.edges[0].target == 1);
  CHECK_FALSE(net.edges[1].tie);
  for (std::size_t i = 0; i < 3; ++i) CHECK(net.adjacency(i, i) == 0.0);
  CHECK(net.adjacency(0, 1) == Approx(1.0));
  CHECK(net.adjacency(1, 0) == 0.0);
}

TEST_CASE("estimate_network weights are absolute correlations unless signed") {
  Rng rng(3);
  std::vector<std::vector<double>> cols(6, std::vector<double>(12));
  for (std::size_t t = 0; t < 12; ++t) {
    const double f = rng.laplace();
    for (std::size_t c = 0; c < 6; ++c) cols[c][t] = (c % 2 ? -1.0 : 1.0) * f + 0.7 * rng.laplace();
  }
  const auto p = panel_of(cols);
  const auto corr = correlation_matrix(p);
  const auto net = estimate_network(p);
  CHECK(net.edges.size() == 12);
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) nonzero += net.adjacency(i, j) != 0.0;
  CHECK(nonzero == 12);
  for (const auto& e : net.edges) {
    CHECK(e.weight == Approx(std::abs(corr(e.source, e.target))).epsilon(1e-15));
    CHECK(net.adjacency(e.target, e.source) == 0.0);
  }
  const auto signed_net = estimate_network(p, {true});
  bool negative = false;
  for (const auto& e : signed_net.edges) negative = negative || e.weight < 0;
  CHECK(negative);
}
