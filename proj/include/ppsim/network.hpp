#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ppsim/types.hpp"

namespace ppsim::network {

/// Time series of one country's indicators: rows are years, columns are
/// indicators. Values are complete (missing cells already imputed).
class IndicatorPanel {
 public:
  /// Throws Error on fewer than 3 rows, ragged data, non-finite values or a
  /// label/column count mismatch.
  IndicatorPanel(std::vector<std::string> labels, std::vector<int> years, Matrix values);

  std::size_t rows() const noexcept { return values_.rows(); }
  std::size_t cols() const noexcept { return values_.cols(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<int>& years() const noexcept { return years_; }
  const Matrix& values() const noexcept { return values_; }

  std::vector<double> column(std::size_t c) const;
  std::vector<double> row(std::size_t r) const;
  std::size_t index_of(const std::string& label) const;

 private:
  std::vector<std::string> labels_;
  std::vector<int> years_;
  Matrix values_;
};

/// Fills NaN cells of one series: linear interpolation between observations,
/// nearest observation at the ends. Returns false when more than half the
/// series is missing (the series is left untouched).
bool impute_series(std::vector<double>& series);

/// Pearson correlations of the panel's columns. Throws Error on a
/// zero-variance column.
Matrix correlation_matrix(const IndicatorPanel& panel);

struct Edge {
  std::size_t a;
  std::size_t b;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Triangulated maximally filtered graph over a symmetric similarity matrix.
///
/// Starts from the 4-clique of maximal total similarity, then repeatedly
/// inserts the (vertex, face) pair with the largest gain, where the gain is
/// the sum of the vertex's similarities to the face's three corners. Ties go
/// to the lowest vertex, then the oldest face. Edges come back with a < b in
/// insertion order; there are exactly 3(N - 2) of them.
std::vector<Edge> tmfg(const Matrix& similarity);

/// Pairwise likelihood-ratio score on standardized series with g = tanh:
/// R = rho * (mean[x g(y)] - mean[g(x) y]). Positive values favour x -> y.
double likelihood_ratio(const std::vector<double>& x, const std::vector<double>& y);

struct DirectedEdge {
  std::size_t source;
  std::size_t target;
  double weight;
  bool tie = false;  // R was exactly zero; direction fixed by label order
};

struct DirectedSpilloverNetwork {
  std::vector<std::string> labels;
  Matrix adjacency;  // adjacency(source, target) = weight
  std::vector<DirectedEdge> edges;
};

struct OrientOptions {
  /// Keep the sign of the correlation in edge weights instead of |rho|.
  bool signed_weights = false;
};

/// Gives every skeleton edge exactly one direction from the sign of R.
/// Weight is |rho| (or rho with signed_weights).
DirectedSpilloverNetwork orient_edges(const IndicatorPanel& panel, const std::vector<Edge>& skeleton,
                                      const OrientOptions& options = {});

/// correlation -> |rho| similarity -> tmfg -> orient_edges.
DirectedSpilloverNetwork estimate_network(const IndicatorPanel& panel, const OrientOptions& options = {});

}  // namespace ppsim::network
