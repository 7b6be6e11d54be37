#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ppsim/simulation.hpp"
#include "ppsim/types.hpp"

namespace ppsim::analysis {

/// Assigns every indicator to exactly one pillar (at most 13 distinct).
class PillarMap {
 public:
  static constexpr std::size_t kMaxPillars = 13;

  /// `pillar_of_issue[i]` is the pillar label of indicator i.
  explicit PillarMap(std::vector<std::string> pillar_of_issue);

  std::size_t issues() const noexcept { return pillar_of_issue_.size(); }
  /// Distinct pillar labels in order of first appearance.
  const std::vector<std::string>& pillars() const noexcept { return pillars_; }
  std::size_t pillar_index(std::size_t issue) const { return index_.at(issue); }
  std::size_t pillar_size(std::size_t pillar) const;

 private:
  std::vector<std::string> pillar_of_issue_;
  std::vector<std::string> pillars_;
  std::vector<std::size_t> index_;
};

enum class DiscoveryAveraging { TimeAverage, FinalPeriod };

struct DiscoveryOptions {
  DiscoveryAveraging averaging = DiscoveryAveraging::TimeAverage;
  RunOptions run;
  unsigned threads = 0;  // 0: default_threads()
};

/// Expected allocation profile under normal adaptive behaviour: the mean over
/// `runs` lax-uninformed simulations (each with its own arbitrary starting
/// profile) of the time-averaged allocation, renormalized to the budget.
Vector discover_profile(const CountryConfig& cfg, std::size_t runs, std::uint64_t master_seed,
                        const DiscoveryOptions& options = {});

struct RegimeEnsemble {
  PolicyRegime regime;
  std::vector<RunResult> runs;
};

/// Runs every regime on the same `runs` seeds (common random numbers).
std::vector<RegimeEnsemble> simulate_ensembles(const CountryConfig& cfg, const std::vector<PolicyRegime>& regimes,
                                               std::size_t runs, std::uint64_t master_seed,
                                               const RunOptions& options = {}, unsigned threads = 0);

/// Summaries plus benchmark comparisons. The benchmark is the lax-uninformed
/// ensemble, which must be present.
EnsembleStats summarize(const std::vector<RegimeEnsemble>& ensembles);

EnsembleStats evaluate_regimes(const CountryConfig& cfg, const std::vector<PolicyRegime>& regimes,
                               std::size_t runs, std::uint64_t master_seed, const RunOptions& options = {},
                               unsigned threads = 0);

/// All four regimes: arbitrary profiles for the uninformed ones, `discovered`
/// pinned for the informed ones.
std::vector<PolicyRegime> standard_regimes(const Vector& discovered, double budget,
                                           const std::vector<RegimeKind>& kinds = {std::begin(kAllRegimes),
                                                                                   std::end(kAllRegimes)});

struct PillarGains {
  std::vector<std::string> pillars;
  Vector raw;            // mean diversion in the pillar, benchmark minus alternative
  Vector per_indicator;  // raw divided by the pillar's indicator count
};

/// Per-pillar efficiency gain. Throws Error if the map does not cover the
/// runs' issues.
PillarGains pillar_gains(const std::vector<RunResult>& benchmark, const std::vector<RunResult>& alternative,
                         const PillarMap& pillars);

/// Ward agglomerative clustering (Euclidean) cut at k clusters. Labels are
/// 0..k-1, numbered by each cluster's lowest row index.
std::vector<std::size_t> ward_clusters(const Matrix& features, std::size_t k);

struct CalibrationTarget {
  CountryConfig config;  // gamma is overwritten by each grid point
  double empirical_corruption;
};

struct CalibrationResult {
  double gamma = 0.0;
  double objective = 0.0;
  std::vector<std::pair<double, double>> grid;  // (gamma, objective)
};

/// Grid search over gamma. For each point, every country runs
/// `runs_per_point` lax-uninformed simulations; the objective is the mean
/// squared difference between the per-period corruption L / ell averaged over
/// runs and the empirical score. Returns the first argmin.
CalibrationResult calibrate_gamma(const std::vector<CalibrationTarget>& countries, const std::vector<double>& grid,
                                  std::size_t runs_per_point, std::uint64_t seed, const RunOptions& options = {},
                                  unsigned threads = 0);

/// Mean per-period corruption of lax-uninformed runs for one country; the
/// quantity calibrate_gamma matches against empirical scores.
double simulated_corruption_score(const CountryConfig& cfg, std::size_t runs, std::uint64_t seed,
                                  std::uint64_t stream, const RunOptions& options = {}, unsigned threads = 0);

}  // namespace ppsim::analysis
