#include "ppsim/simulation.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "ppsim/dynamics.hpp"
#include "ppsim/government.hpp"
#include "ppsim/parallel.hpp"
#include "ppsim/rng.hpp"

namespace ppsim {

unsigned default_threads() {
  if (const char* env = std::getenv("PPSIM_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

bool all_converged(const Vector& indicators, const Vector& targets, double tolerance) {
  for (std::size_t i = 0; i < indicators.size(); ++i) {
    if (indicators[i] < targets[i] - tolerance) return false;
  }
  return true;
}

}  // namespace

RunResult run(const CountryConfig& cfg, const PolicyRegime& regime, std::uint64_t seed,
              const RunOptions& options) {
  const std::size_t n = cfg.n();
  const double budget = cfg.budget();
  const auto rol = cfg.rule_of_law_idx();
  const auto coc = cfg.control_of_corruption_idx();
  const NetworkDegrees degrees = NetworkDegrees::of(cfg.adjacency());

  RunResult result;
  result.per_issue_diversion.assign(n, 0.0);
  result.mean_allocation.assign(n, 0.0);
  if (options.record_trajectories) result.trajectories.emplace();

  if (all_converged(cfg.initial_indicators(), cfg.targets(), options.tolerance)) {
    result.converged = true;
    return result;
  }

  Rng rng(seed);
  const PolicyRegime resolved =
      regime.pinned_profile() ? regime
                              : PolicyRegime(regime.kind(), government::arbitrary_profile(n, budget, rng), budget);
  const Vector& initial_profile = *resolved.pinned_profile();

  SimState state;
  state.indicators = cfg.initial_indicators();
  {
    const double f_r = dynamics::institutional_map(state.indicators[rol]);
    const double f_c = dynamics::institutional_map(state.indicators[coc]);
    Vector lag_c[2];
    Vector lag_f[2];
    std::vector<std::uint8_t> theta;
    for (int lag = 0; lag < 2; ++lag) {
      lag_c[lag].resize(n);
      for (std::size_t i = 0; i < n; ++i) lag_c[lag][i] = rng.uniform() * initial_profile[i];
      theta = dynamics::draw_monitoring(dynamics::monitoring_probabilities(initial_profile, lag_c[lag], f_c), rng);
      lag_f[lag] = dynamics::compute_benefits(state.indicators, initial_profile, lag_c[lag], theta, f_r);
    }
    state.contributions_lag2 = std::move(lag_c[0]);
    state.contributions = std::move(lag_c[1]);
    state.benefits_lag2 = std::move(lag_f[0]);
    state.benefits = std::move(lag_f[1]);
    state.monitoring = std::move(theta);
  }

  const Vector& targets = cfg.targets();
  while (state.t < cfg.max_periods()) {
    const double f_r = dynamics::institutional_map(state.indicators[rol]);
    const double f_c = dynamics::institutional_map(state.indicators[coc]);

    state.allocations = government::next_allocation(resolved, state, cfg, degrees, f_r, state.monitoring);
    Vector contributions = dynamics::update_contributions(state, state.allocations);
    auto theta = dynamics::draw_monitoring(
        dynamics::monitoring_probabilities(state.allocations, contributions, f_c), rng);
    Vector benefits = dynamics::compute_benefits(state.indicators, state.allocations, contributions, theta, f_r);
    Vector indicators = dynamics::propagate_indicators(state.indicators, contributions, cfg);

    for (std::size_t i = 0; i < n; ++i) {
      const double diverted = (state.allocations[i] - contributions[i]) / budget;
      result.per_issue_diversion[i] += diverted;
      result.mean_allocation[i] += state.allocations[i];
    }
    if (result.trajectories) {
      result.trajectories->allocations.push_back(state.allocations);
      result.trajectories->contributions.push_back(contributions);
      result.trajectories->indicators.push_back(indicators);
      result.trajectories->monitoring.push_back(theta);
    }

    state.contributions_lag2 = std::move(state.contributions);
    state.contributions = std::move(contributions);
    state.benefits_lag2 = std::move(state.benefits);
    state.benefits = std::move(benefits);
    state.indicators = std::move(indicators);
    state.monitoring = std::move(theta);
    ++state.t;

    if (all_converged(state.indicators, targets, options.tolerance)) {
      result.converged = true;
      break;
    }
  }

  for (double d : result.per_issue_diversion) result.corruption += d;
  result.periods = state.t;
  for (auto& p : result.mean_allocation) p /= static_cast<double>(state.t);
  result.final_allocation = std::move(state.allocations);
  return result;
}

std::vector<RunResult> sweep(const CountryConfig& cfg, const PolicyRegime& regime,
                             std::span<const std::uint64_t> seeds, const RunOptions& options, unsigned threads) {
  std::vector<RunResult> results(seeds.size());
  parallel_for(
      seeds.size(), [&](std::size_t i) { results[i] = run(cfg, regime, seeds[i], options); },
      threads == 0 ? default_threads() : threads);
  return results;
}

std::vector<std::uint64_t> make_seeds(std::uint64_t master_seed, std::uint64_t stream, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t i = 0; i < count; ++i) seeds[i] = derive_seed(master_seed, stream, i);
  return seeds;
}

}  // namespace ppsim
