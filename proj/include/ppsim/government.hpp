#pragma once

#include <cstdint>
#include <span>

#include "ppsim/rng.hpp"
#include "ppsim/types.hpp"

namespace ppsim::government {

/// q_i = max(0, T_i - I_i) * (K_i + 1) * (1 - theta_i * f_R)
Vector propensities(std::span<const double> indicators, std::span<const std::uint8_t> monitoring, double f_r,
                    const NetworkDegrees& degrees, std::span<const double> targets);

/// P_i = B * q_i / sum(q); uniform B/N when every propensity is zero.
Vector allocate(std::span<const double> propensities, double budget);

/// Allocation for period `state.t` under `regime`. Strict regimes return the
/// pinned profile every period; lax regimes return it only at t = 0 and
/// re-allocate by propensity afterwards, using `monitoring` from the latest
/// realization. Throws Error when the regime carries no profile.
Vector next_allocation(const PolicyRegime& regime, const SimState& state, const CountryConfig& cfg,
                       const NetworkDegrees& degrees, double f_r, std::span<const std::uint8_t> monitoring);

/// Arbitrary profile A: a Dirichlet(1, ..., 1) draw scaled by B. Consumes
/// exactly N uniforms.
Vector arbitrary_profile(std::size_t n, double budget, Rng& rng);

}  // namespace ppsim::government
