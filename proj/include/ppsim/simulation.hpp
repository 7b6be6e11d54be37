#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ppsim/types.hpp"

namespace ppsim {

struct RunOptions {
  /// A run converges once every I_i >= T_i - tolerance.
  double tolerance = 1e-4;
  bool record_trajectories = false;
};

/// Simulates one country under one regime until convergence or
/// cfg.max_periods.
///
/// Random draws happen in a fixed order: the arbitrary profile (uninformed
/// regimes without a pinned profile, N uniforms), then for each of the two
/// bootstrap lags N contribution uniforms followed by N monitoring uniforms,
/// then N monitoring uniforms per period.
///
/// Within a period the order is allocation, contributions, monitoring,
/// benefits, indicators. The government's allocation in period t sees the
/// scandal realization drawn in period t - 1 (the one already folded into
/// the functionaries' benefits).
RunResult run(const CountryConfig& cfg, const PolicyRegime& regime, std::uint64_t seed,
              const RunOptions& options = {});

/// Independent runs, one per seed, returned in seed order. Results do not
/// depend on the worker count.
std::vector<RunResult> sweep(const CountryConfig& cfg, const PolicyRegime& regime,
                             std::span<const std::uint64_t> seeds, const RunOptions& options = {},
                             unsigned threads = 0);

/// Seeds derived from a master seed for the given stream.
std::vector<std::uint64_t> make_seeds(std::uint64_t master_seed, std::uint64_t stream, std::size_t count);

}  // namespace ppsim
