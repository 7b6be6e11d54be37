#include "ppsim/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace ppsim::dynamics {

namespace {

void require_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DimensionError(fmt::format("{}: length {} does not match {}", what, a, b));
}

}  // namespace

Vector propagate_indicators(std::span<const double> previous, std::span<const double> contributions,
                            const CountryConfig& cfg) {
  const std::size_t n = cfg.n();
  require_same(previous.size(), n, "indicators");
  require_same(contributions.size(), n, "contributions");

  const auto& targets = cfg.targets();
  const auto& in_edges = cfg.in_edges();
  Vector next(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double gap = std::max(0.0, targets[i] - previous[i]);
    double effective = contributions[i];
    for (const InEdge& e : in_edges[i]) effective += contributions[e.source] * e.weight;
    next[i] = std::clamp(previous[i] + cfg.gamma() * gap * effective, 0.0, 1.0);
  }
  return next;
}

Vector monitoring_probabilities(std::span<const double> allocations, std::span<const double> contributions,
                                double f_c) {
  require_same(contributions.size(), allocations.size(), "contributions");
  const std::size_t n = allocations.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += allocations[i] - contributions[i];

  Vector probs(n, 0.0);
  if (total <= 0.0) return probs;
  for (std::size_t i = 0; i < n; ++i) {
    probs[i] = std::clamp(f_c * (allocations[i] - contributions[i]) / total, 0.0, 1.0);
  }
  return probs;
}

std::vector<std::uint8_t> draw_monitoring(std::span<const double> probabilities, Rng& rng) {
  std::vector<std::uint8_t> theta(probabilities.size());
  for (std::size_t i = 0; i < probabilities.size(); ++i) theta[i] = rng.bernoulli(probabilities[i]) ? 1 : 0;
  return theta;
}

double institutional_map(double indicator_level) {
  return indicator_level / std::exp(1.0 - indicator_level);
}

Vector compute_benefits(std::span<const double> indicators, std::span<const double> allocations,
                        std::span<const double> contributions, std::span<const std::uint8_t> monitoring,
                        double f_r) {
  const std::size_t n = indicators.size();
  require_same(allocations.size(), n, "allocations");
  require_same(contributions.size(), n, "contributions");
  require_same(monitoring.size(), n, "monitoring");

  Vector benefits(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double diversion = allocations[i] - contributions[i];
    benefits[i] = (indicators[i] + diversion) * (1.0 - monitoring[i] * f_r);
  }
  return benefits;
}

Vector update_contributions(const SimState& state, std::span<const double> new_allocations) {
  const std::size_t n = new_allocations.size();
  require_same(state.contributions.size(), n, "contributions");
  require_same(state.contributions_lag2.size(), n, "contributions_lag2");
  require_same(state.benefits.size(), n, "benefits");
  require_same(state.benefits_lag2.size(), n, "benefits_lag2");

  Vector next(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c1 = state.contributions[i];
    const double c2 = state.contributions_lag2[i];
    const double delta_f = state.benefits[i] - state.benefits_lag2[i];
    const double delta_c = c1 - c2;
    // Product of signs rather than sign of the product, which can underflow.
    const int d = sign(delta_f) * sign(delta_c);
    const double raw = c1 + d * std::abs(delta_f) * (c1 + c2) / 2.0;
    next[i] = std::min(new_allocations[i], std::max(0.0, raw));
  }
  return next;
}

}  // namespace ppsim::dynamics
