#include "ppsim/government.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace ppsim::government {

Vector propensities(std::span<const double> indicators, std::span<const std::uint8_t> monitoring, double f_r,
                    const NetworkDegrees& degrees, std::span<const double> targets) {
  const std::size_t n = indicators.size();
  if (monitoring.size() != n || targets.size() != n || degrees.out_degree.size() != n) {
    throw DimensionError(fmt::format("propensities: inconsistent dimensions for N = {}", n));
  }
  Vector q(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double gap = std::max(0.0, targets[i] - indicators[i]);
    q[i] = gap * static_cast<double>(degrees.out_degree[i] + 1) * (1.0 - monitoring[i] * f_r);
  }
  return q;
}

Vector allocate(std::span<const double> propensities, double budget) {
  const std::size_t n = propensities.size();
  double total = 0.0;
  for (double q : propensities) total += q;

  Vector p(n);
  if (!(total > 0.0)) {
    std::fill(p.begin(), p.end(), budget / static_cast<double>(n));
    return p;
  }
  for (std::size_t i = 0; i < n; ++i) p[i] = budget * propensities[i] / total;
  return p;
}

Vector next_allocation(const PolicyRegime& regime, const SimState& state, const CountryConfig& cfg,
                       const NetworkDegrees& degrees, double f_r, std::span<const std::uint8_t> monitoring) {
  const auto& profile = regime.pinned_profile();
  if (!profile) throw Error(fmt::format("regime {} has no pinned profile", to_string(regime.kind())));
  if (profile->size() != cfg.n()) {
    throw DimensionError(fmt::format("pinned profile has length {} but N = {}", profile->size(), cfg.n()));
  }
  if (is_strict(regime.kind()) || state.t == 0) return *profile;
  return allocate(propensities(state.indicators, monitoring, f_r, degrees, cfg.targets()), cfg.budget());
}

Vector arbitrary_profile(std::size_t n, double budget, Rng& rng) {
  Vector a(n);
  double total = 0.0;
  for (auto& x : a) {
    x = rng.exponential();
    total += x;
  }
  if (!(total > 0.0)) {
    std::fill(a.begin(), a.end(), budget / static_cast<double>(n));
    return a;
  }
  for (auto& x : a) x = budget * x / total;
  return a;
}

}  // namespace ppsim::government
