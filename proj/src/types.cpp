#include "ppsim/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace ppsim {

bool ValidationReport::mentions(std::string_view needle) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) {
    return v.field.find(needle) != std::string::npos || v.message.find(needle) != std::string::npos;
  });
}

std::string ValidationReport::to_string() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.field + ": " + v.message;
  }
  return out;
}

namespace {

void check_unit_range(const Vector& values, std::string_view field, std::vector<Violation>& out) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = values[i];
    if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
      out.push_back({std::string(field), fmt::format("range: entry {} = {} outside [0,1]", i, x)});
    }
  }
}

}  // namespace

ValidationReport validate_config(const ConfigData& d) {
  ValidationReport report;
  auto& out = report.violations;
  const std::size_t n = d.initial_indicators.size();

  if (n == 0) out.push_back({"n", "at least one policy issue is required"});
  if (d.targets.size() != n) {
    out.push_back({"targets", fmt::format("dimension: length {} but N = {}", d.targets.size(), n)});
  }
  check_unit_range(d.initial_indicators, "initial_indicators", out);
  check_unit_range(d.targets, "targets", out);

  if (d.adjacency.rows() != n || d.adjacency.cols() != n) {
    out.push_back({"adjacency", fmt::format("dimension: {}x{} but N = {}", d.adjacency.rows(),
                                            d.adjacency.cols(), n)});
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (d.adjacency(i, i) != 0.0) {
        out.push_back({"adjacency", fmt::format("diagonal: entry ({0},{0}) = {1} must be zero", i,
                                                d.adjacency(i, i))});
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(d.adjacency(i, j))) {
          out.push_back({"adjacency", fmt::format("entry ({},{}) is not finite", i, j)});
        }
      }
    }
  }

  if (!(d.budget > 0.0) || !std::isfinite(d.budget)) {
    out.push_back({"budget", fmt::format("must be a finite positive number, got {}", d.budget)});
  }
  if (!(d.gamma > 0.0) || !std::isfinite(d.gamma)) {
    out.push_back({"gamma", fmt::format("must be a finite positive number, got {}", d.gamma)});
  }
  if (d.rule_of_law_idx >= n) {
    out.push_back({"rule_of_law_idx", fmt::format("index {} out of range for N = {}", d.rule_of_law_idx, n)});
  }
  if (d.control_of_corruption_idx >= n) {
    out.push_back({"control_of_corruption_idx",
                   fmt::format("index {} out of range for N = {}", d.control_of_corruption_idx, n)});
  }
  if (d.max_periods == 0) out.push_back({"max_periods", "must be positive"});
  if (!d.labels.empty() && d.labels.size() != n) {
    out.push_back({"labels", fmt::format("dimension: {} labels but N = {}", d.labels.size(), n)});
  }
  return report;
}

ConfigError::ConfigError(ValidationReport report)
    : Error("invalid country config: " + report.to_string()), report_(std::move(report)) {}

CountryConfig CountryConfig::create(ConfigData data) {
  auto report = validate_config(data);
  if (!report.ok()) throw ConfigError(std::move(report));
  return CountryConfig(std::move(data));
}

CountryConfig::CountryConfig(ConfigData data) : data_(std::move(data)) {
  const std::size_t n = data_.initial_indicators.size();
  pre_converged_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    pre_converged_[i] = data_.targets[i] <= data_.initial_indicators[i];
  }
  in_edges_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (data_.adjacency(j, i) != 0.0) in_edges_[i].push_back({j, data_.adjacency(j, i)});
    }
  }
}

CountryConfig CountryConfig::with_gamma(double gamma) const {
  ConfigData d = data_;
  d.gamma = gamma;
  return create(std::move(d));
}

CountryConfig CountryConfig::with_max_periods(std::size_t max_periods) const {
  ConfigData d = data_;
  d.max_periods = max_periods;
  return create(std::move(d));
}

NetworkDegrees NetworkDegrees::of(const Matrix& adjacency) {
  NetworkDegrees k;
  k.out_degree.assign(adjacency.rows(), 0);
  for (std::size_t i = 0; i < adjacency.rows(); ++i) {
    for (std::size_t j = 0; j < adjacency.cols(); ++j) {
      if (adjacency(i, j) != 0.0) ++k.out_degree[i];
    }
  }
  return k;
}

std::string_view to_string(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::LaxUninformed: return "lax_uninformed";
    case RegimeKind::StrictUninformed: return "strict_uninformed";
    case RegimeKind::LaxInformed: return "lax_informed";
    case RegimeKind::StrictInformed: return "strict_informed";
  }
  return "unknown";
}

RegimeKind parse_regime_kind(std::string_view name) {
  std::string s(name);
  std::replace(s.begin(), s.end(), '-', '_');
  for (RegimeKind k : kAllRegimes) {
    if (s == to_string(k)) return k;
  }
  throw Error(fmt::format("unknown regime '{}'", name));
}

bool is_strict(RegimeKind kind) {
  return kind == RegimeKind::StrictInformed || kind == RegimeKind::StrictUninformed;
}

bool is_informed(RegimeKind kind) {
  return kind == RegimeKind::LaxInformed || kind == RegimeKind::StrictInformed;
}

PolicyRegime::PolicyRegime(RegimeKind kind, Vector pinned_profile, double budget) : kind_(kind) {
  if (pinned_profile.empty()) throw Error("pinned profile must not be empty");
  double sum = 0.0;
  for (double p : pinned_profile) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw Error("pinned profile entries must be non-negative");
    sum += p;
  }
  if (std::abs(sum - budget) > 1e-9 * budget) {
    throw Error(fmt::format("pinned profile sums to {} but budget is {}", sum, budget));
  }
  profile_ = std::move(pinned_profile);
}

PolicyRegime PolicyRegime::arbitrary(RegimeKind kind) {
  if (is_informed(kind)) throw Error("informed regimes need a discovered profile");
  return PolicyRegime(kind);
}

const RegimeSummary& EnsembleStats::summary(RegimeKind kind) const {
  for (const auto& r : regimes) {
    if (r.kind == kind) return r;
  }
  throw Error(fmt::format("no summary for regime {}", to_string(kind)));
}

const Comparison& EnsembleStats::comparison(RegimeKind alternative) const {
  for (const auto& c : comparisons) {
    if (c.alternative == alternative) return c;
  }
  throw Error(fmt::format("no comparison for regime {}", to_string(alternative)));
}

}  // namespace ppsim
