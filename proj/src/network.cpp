#include "ppsim/network.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace ppsim::network {

IndicatorPanel::IndicatorPanel(std::vector<std::string> labels, std::vector<int> years, Matrix values)
    : labels_(std::move(labels)), years_(std::move(years)), values_(std::move(values)) {
  if (values_.rows() < 3) throw Error(fmt::format("panel needs at least 3 rows, got {}", values_.rows()));
  if (labels_.size() != values_.cols()) {
    throw Error(fmt::format("panel has {} labels for {} columns", labels_.size(), values_.cols()));
  }
  if (years_.size() != values_.rows()) {
    throw Error(fmt::format("panel has {} years for {} rows", years_.size(), values_.rows()));
  }
  for (double v : values_.values()) {
    if (!std::isfinite(v)) throw Error("panel contains missing or non-finite values");
  }
}

std::vector<double> IndicatorPanel::column(std::size_t c) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = values_(r, c);
  return out;
}

std::vector<double> IndicatorPanel::row(std::size_t r) const {
  std::vector<double> out(cols());
  for (std::size_t c = 0; c < cols(); ++c) out[c] = values_(r, c);
  return out;
}

std::size_t IndicatorPanel::index_of(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw Error(fmt::format("label '{}' not found in panel", label));
  return static_cast<std::size_t>(it - labels_.begin());
}

bool impute_series(std::vector<double>& series) {
  std::vector<std::size_t> observed;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (std::isfinite(series[i])) observed.push_back(i);
  }
  if (observed.empty() || 2 * (series.size() - observed.size()) > series.size()) return false;

  for (std::size_t i = 0; i < observed.front(); ++i) series[i] = series[observed.front()];
  for (std::size_t i = observed.back() + 1; i < series.size(); ++i) series[i] = series[observed.back()];
  for (std::size_t k = 0; k + 1 < observed.size(); ++k) {
    const std::size_t lo = observed[k];
    const std::size_t hi = observed[k + 1];
    for (std::size_t i = lo + 1; i < hi; ++i) {
      const double w = static_cast<double>(i - lo) / static_cast<double>(hi - lo);
      series[i] = (1.0 - w) * series[lo] + w * series[hi];
    }
  }
  return true;
}

namespace {

std::vector<double> standardize(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - mean) / sd;
  return z;
}

double mean_product(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s / static_cast<double>(a.size());
}

}  // namespace

Matrix correlation_matrix(const IndicatorPanel& panel) {
  const std::size_t n = panel.cols();
  std::vector<std::vector<double>> z(n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto col = panel.column(c);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    if (*lo == *hi) throw Error(fmt::format("column '{}' has zero variance", panel.labels()[c]));
    z[c] = standardize(col);
  }
  Matrix corr = Matrix::square(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    corr(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = std::clamp(mean_product(z[i], z[j]), -1.0, 1.0);
      corr(i, j) = r;
      corr(j, i) = r;
    }
  }
  return corr;
}

std::vector<Edge> tmfg(const Matrix& s) {
  const std::size_t n = s.rows();
  if (s.cols() != n) throw DimensionError("similarity matrix must be square");
  if (n < 4) throw Error(fmt::format("tmfg needs at least 4 vertices, got {}", n));

  std::array<std::size_t, 4> seed{0, 1, 2, 3};
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double ab = s(a, b);
      for (std::size_t c = b + 1; c < n; ++c) {
        const double abc = ab + s(a, c) + s(b, c);
        for (std::size_t d = c + 1; d < n; ++d) {
          const double total = abc + s(a, d) + s(b, d) + s(c, d);
          if (total > best) {
            best = total;
            seed = {a, b, c, d};
          }
        }
      }
    }
  }

  std::vector<Edge> edges;
  edges.reserve(3 * (n - 2));
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) edges.push_back({seed[i], seed[j]});
  }
  using Face = std::array<std::size_t, 3>;
  std::vector<Face> faces{{seed[0], seed[1], seed[2]},
                          {seed[0], seed[1], seed[3]},
                          {seed[0], seed[2], seed[3]},
                          {seed[1], seed[2], seed[3]}};
  std::vector<bool> placed(n, false);
  for (std::size_t v : seed) placed[v] = true;

  for (std::size_t step = 4; step < n; ++step) {
    double best_gain = -std::numeric_limits<double>::infinity();
    std::size_t best_vertex = 0;
    std::size_t best_face = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if (placed[v]) continue;
      for (std::size_t f = 0; f < faces.size(); ++f) {
        const Face& face = faces[f];
        const double gain = s(v, face[0]) + s(v, face[1]) + s(v, face[2]);
        if (gain > best_gain) {
          best_gain = gain;
          best_vertex = v;
          best_face = f;
        }
      }
    }
    const Face face = faces[best_face];
    const std::size_t v = best_vertex;
    placed[v] = true;
    for (std::size_t corner : face) edges.push_back({std::min(corner, v), std::max(corner, v)});
    faces[best_face] = {face[0], face[1], v};
    faces.push_back({face[1], face[2], v});
    faces.push_back({face[0], face[2], v});
  }
  for (auto& e : edges) {
    if (e.a > e.b) std::swap(e.a, e.b);
  }
  return edges;
}

double likelihood_ratio(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) throw DimensionError("likelihood_ratio: series lengths differ");
  const auto zx = standardize(x);
  const auto zy = standardize(y);
  const double n = static_cast<double>(zx.size());
  double rho = 0.0;
  double x_gy = 0.0;
  double gx_y = 0.0;
  for (std::size_t t = 0; t < zx.size(); ++t) {
    rho += zx[t] * zy[t];
    x_gy += zx[t] * std::tanh(zy[t]);
    gx_y += std::tanh(zx[t]) * zy[t];
  }
  return (rho / n) * (x_gy / n - gx_y / n);
}

DirectedSpilloverNetwork orient_edges(const IndicatorPanel& panel, const std::vector<Edge>& skeleton,
                                      const OrientOptions& options) {
  const std::size_t n = panel.cols();
  const Matrix corr = correlation_matrix(panel);
  DirectedSpilloverNetwork net;
  net.labels = panel.labels();
  net.adjacency = Matrix::square(n, 0.0);
  net.edges.reserve(skeleton.size());
  for (const Edge& e : skeleton) {
    if (e.a >= n || e.b >= n || e.a == e.b) {
      throw Error(fmt::format("skeleton edge ({}, {}) does not reference two panel columns", e.a, e.b));
    }
    const double r = likelihood_ratio(panel.column(e.a), panel.column(e.b));
    DirectedEdge d{e.a, e.b, 0.0, false};
    if (r < 0.0) {
      std::swap(d.source, d.target);
    } else if (r == 0.0) {
      d.tie = true;
      if (panel.labels()[e.b] < panel.labels()[e.a]) std::swap(d.source, d.target);
    }
    const double rho = corr(e.a, e.b);
    d.weight = options.signed_weights ? rho : std::abs(rho);
    net.adjacency(d.source, d.target) = d.weight;
    net.edges.push_back(d);
  }
  return net;
}

DirectedSpilloverNetwork estimate_network(const IndicatorPanel& panel, const OrientOptions& options) {
  Matrix similarity = correlation_matrix(panel);
  for (std::size_t i = 0; i < similarity.rows(); ++i) {
    for (std::size_t j = 0; j < similarity.cols(); ++j) similarity(i, j) = std::abs(similarity(i, j));
  }
  return orient_edges(panel, tmfg(similarity), options);
}

}  // namespace ppsim::network
