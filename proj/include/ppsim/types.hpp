#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ppsim {

using Vector = std::vector<double>;

/// Row-major square matrix. Entry (j, i) of the spillover network holds the
/// influence of issue j on issue i.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix square(std::size_t n, double fill = 0.0) { return Matrix(n, n, fill); }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  const std::vector<double>& values() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Unvalidated inputs for a country. Turned into a CountryConfig by
/// CountryConfig::create, which rejects anything validate_config flags.
struct ConfigData {
  Vector initial_indicators;
  Vector targets;
  Matrix adjacency;
  double budget = 1.0;
  double gamma = 0.1;
  std::size_t rule_of_law_idx = 0;
  std::size_t control_of_corruption_idx = 1;
  std::size_t max_periods = 10000;
  std::vector<std::string> labels;  // optional, empty or length N

  friend bool operator==(const ConfigData&, const ConfigData&) = default;
};

struct Violation {
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool mentions(std::string_view needle) const;
  std::string to_string() const;
};

ValidationReport validate_config(const ConfigData& data);

class ConfigError : public Error {
 public:
  explicit ConfigError(ValidationReport report);
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

/// Incoming spillover edge of an issue: contributions to `source` also move
/// the target indicator with this weight.
struct InEdge {
  std::size_t source;
  double weight;
};

/// Validated, immutable country configuration.
class CountryConfig {
 public:
  /// Throws ConfigError listing every violated invariant.
  static CountryConfig create(ConfigData data);

  CountryConfig with_gamma(double gamma) const;
  CountryConfig with_max_periods(std::size_t max_periods) const;

  std::size_t n() const noexcept { return data_.initial_indicators.size(); }
  const Vector& initial_indicators() const noexcept { return data_.initial_indicators; }
  const Vector& targets() const noexcept { return data_.targets; }
  const Matrix& adjacency() const noexcept { return data_.adjacency; }
  double budget() const noexcept { return data_.budget; }
  double gamma() const noexcept { return data_.gamma; }
  std::size_t rule_of_law_idx() const noexcept { return data_.rule_of_law_idx; }
  std::size_t control_of_corruption_idx() const noexcept { return data_.control_of_corruption_idx; }
  std::size_t max_periods() const noexcept { return data_.max_periods; }
  const std::vector<std::string>& labels() const noexcept { return data_.labels; }
  const ConfigData& data() const noexcept { return data_; }

  /// Issues with T_i <= I_{i,0}; they never receive a positive gap.
  const std::vector<bool>& pre_converged() const noexcept { return pre_converged_; }
  /// Nonzero incoming spillovers per target issue, in ascending source order.
  const std::vector<std::vector<InEdge>>& in_edges() const noexcept { return in_edges_; }

  friend bool operator==(const CountryConfig& a, const CountryConfig& b) { return a.data_ == b.data_; }

 private:
  explicit CountryConfig(ConfigData data);

  ConfigData data_;
  std::vector<bool> pre_converged_;
  std::vector<std::vector<InEdge>> in_edges_;
};

/// Out-degree K_i of each issue in the spillover network.
struct NetworkDegrees {
  std::vector<std::size_t> out_degree;

  static NetworkDegrees of(const Matrix& adjacency);
};

/// Mutable per-run state. Holds the current period's vectors plus the two
/// lags of contributions and benefits the learning rule needs.
struct SimState {
  std::size_t t = 0;
  Vector allocations;
  Vector contributions;       // C_{t-1}
  Vector contributions_lag2;  // C_{t-2}
  Vector benefits;            // F_{t-1}
  Vector benefits_lag2;       // F_{t-2}
  Vector indicators;
  std::vector<std::uint8_t> monitoring;  // latest theta realization

  std::size_t n() const noexcept { return indicators.size(); }
};

enum class RegimeKind { LaxUninformed, StrictUninformed, LaxInformed, StrictInformed };

std::string_view to_string(RegimeKind kind);
/// Accepts snake_case ("strict_informed") or kebab-case names.
RegimeKind parse_regime_kind(std::string_view name);
bool is_strict(RegimeKind kind);
bool is_informed(RegimeKind kind);

inline constexpr RegimeKind kAllRegimes[] = {RegimeKind::LaxUninformed, RegimeKind::StrictUninformed,
                                             RegimeKind::LaxInformed, RegimeKind::StrictInformed};

/// A policy regime and the profile it pins: the arbitrary profile A for
/// uninformed kinds, the discovered profile for informed kinds.
///
/// An uninformed regime built with `arbitrary()` carries no profile; each run
/// then draws its own A from the run's random stream before the first period.
class PolicyRegime {
 public:
  /// Throws Error unless the profile is non-negative and sums to `budget`.
  PolicyRegime(RegimeKind kind, Vector pinned_profile, double budget);

  static PolicyRegime arbitrary(RegimeKind kind);

  RegimeKind kind() const noexcept { return kind_; }
  const std::optional<Vector>& pinned_profile() const noexcept { return profile_; }

 private:
  explicit PolicyRegime(RegimeKind kind) : kind_(kind) {}

  RegimeKind kind_;
  std::optional<Vector> profile_;
};

/// Per-period records kept when RunOptions::record_trajectories is set.
struct Trajectories {
  std::vector<Vector> allocations;
  std::vector<Vector> contributions;
  std::vector<Vector> indicators;  // after the period's update
  std::vector<std::vector<std::uint8_t>> monitoring;
};

struct RunResult {
  double corruption = 0.0;  // L
  std::size_t periods = 0;  // ell
  bool converged = false;
  Vector per_issue_diversion;  // sum_t (P - C) / B
  Vector mean_allocation;      // time average of P over the run
  Vector final_allocation;
  std::optional<Trajectories> trajectories;

  double corruption_per_period() const noexcept {
    return periods == 0 ? 0.0 : corruption / static_cast<double>(periods);
  }
};

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

struct RegimeSummary {
  RegimeKind kind;
  std::vector<double> samples;
  double mean = 0.0;
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
  double converged_fraction = 0.0;
  double mean_periods = 0.0;
};

struct Comparison {
  RegimeKind alternative;
  double efficiency_gain = 0.0;  // mean L(benchmark) - mean L(alternative)
  WelchResult welch;
};

struct EnsembleStats {
  std::vector<RegimeSummary> regimes;
  std::vector<Comparison> comparisons;

  const RegimeSummary& summary(RegimeKind kind) const;
  const Comparison& comparison(RegimeKind alternative) const;
};

}  // namespace ppsim
