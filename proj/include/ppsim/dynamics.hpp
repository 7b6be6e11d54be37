#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ppsim/rng.hpp"
#include "ppsim/types.hpp"

namespace ppsim::dynamics {

/// Indicator update: I_i + gamma * gap_i * (C_i + sum_j C_j A_ji), clamped to
/// [0,1]. The gap T_i - I_i is floored at zero so issues at or past their
/// target never move backwards.
Vector propagate_indicators(std::span<const double> previous, std::span<const double> contributions,
                            const CountryConfig& cfg);

/// Detection probability per issue: f_C times the issue's share of total
/// diversion. All zeros when nothing is diverted.
Vector monitoring_probabilities(std::span<const double> allocations, std::span<const double> contributions,
                                double f_c);

/// One Bernoulli draw per issue, in index order.
std::vector<std::uint8_t> draw_monitoring(std::span<const double> probabilities, Rng& rng);

/// Maps an institutional indicator into [0,1]: x / e^(1 - x).
double institutional_map(double indicator_level);

/// Functionary benefits: (I + P - C) * (1 - theta * f_R).
Vector compute_benefits(std::span<const double> indicators, std::span<const double> allocations,
                        std::span<const double> contributions, std::span<const std::uint8_t> monitoring,
                        double f_r);

/// sgn with sgn(0) = 0.
inline int sign(double x) noexcept { return (x > 0.0) - (x < 0.0); }

/// Directed-learning step for every functionary, capped to [0, P_new].
Vector update_contributions(const SimState& state, std::span<const double> new_allocations);

}  // namespace ppsim::dynamics
