#include "ppsim/analysis.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "ppsim/parallel.hpp"
#include "ppsim/rng.hpp"
#include "ppsim/stats.hpp"

namespace ppsim::analysis {

PillarMap::PillarMap(std::vector<std::string> pillar_of_issue) : pillar_of_issue_(std::move(pillar_of_issue)) {
  index_.reserve(pillar_of_issue_.size());
  for (std::size_t i = 0; i < pillar_of_issue_.size(); ++i) {
    const auto& label = pillar_of_issue_[i];
    if (label.empty()) throw Error(fmt::format("indicator {} has no pillar", i));
    auto it = std::find(pillars_.begin(), pillars_.end(), label);
    if (it == pillars_.end()) {
      pillars_.push_back(label);
      it = pillars_.end() - 1;
    }
    index_.push_back(static_cast<std::size_t>(it - pillars_.begin()));
  }
  if (pillars_.size() > kMaxPillars) {
    throw Error(fmt::format("{} pillars given, at most {} allowed", pillars_.size(), kMaxPillars));
  }
}

std::size_t PillarMap::pillar_size(std::size_t pillar) const {
  return static_cast<std::size_t>(std::count(index_.begin(), index_.end(), pillar));
}

Vector discover_profile(const CountryConfig& cfg, std::size_t runs, std::uint64_t master_seed,
                        const DiscoveryOptions& options) {
  if (runs == 0) throw Error("discovery needs at least one run");
  const std::size_t n = cfg.n();
  const double budget = cfg.budget();
  const auto seeds = make_seeds(master_seed, streams::kDiscovery, runs);
  const auto results =
      sweep(cfg, PolicyRegime::arbitrary(RegimeKind::LaxUninformed), seeds, options.run, options.threads);

  Vector profile(n, 0.0);
  std::size_t used = 0;
  for (const auto& r : results) {
    if (r.periods == 0) continue;
    const Vector& p = options.averaging == DiscoveryAveraging::TimeAverage ? r.mean_allocation : r.final_allocation;
    for (std::size_t i = 0; i < n; ++i) profile[i] += p[i];
    ++used;
  }
  const double total = std::accumulate(profile.begin(), profile.end(), 0.0);
  if (used == 0 || !(total > 0.0)) return Vector(n, budget / static_cast<double>(n));
  for (auto& p : profile) p = budget * p / total;
  return profile;
}

std::vector<RegimeEnsemble> simulate_ensembles(const CountryConfig& cfg, const std::vector<PolicyRegime>& regimes,
                                               std::size_t runs, std::uint64_t master_seed,
                                               const RunOptions& options, unsigned threads) {
  const auto seeds = make_seeds(master_seed, streams::kEvaluation, runs);
  std::vector<RegimeEnsemble> out;
  out.reserve(regimes.size());
  for (const auto& regime : regimes) {
    out.push_back({regime, sweep(cfg, regime, seeds, options, threads)});
  }
  return out;
}

EnsembleStats summarize(const std::vector<RegimeEnsemble>& ensembles) {
  EnsembleStats stats;
  const RegimeEnsemble* benchmark = nullptr;
  for (const auto& e : ensembles) {
    RegimeSummary s{e.regime.kind(), {}};
    s.samples.reserve(e.runs.size());
    double converged = 0.0;
    double periods = 0.0;
    for (const auto& r : e.runs) {
      s.samples.push_back(r.corruption);
      converged += r.converged ? 1.0 : 0.0;
      periods += static_cast<double>(r.periods);
    }
    if (!s.samples.empty()) {
      const double count = static_cast<double>(s.samples.size());
      s.mean = stats::mean(s.samples);
      s.p25 = stats::quantile(s.samples, 0.25);
      s.p50 = stats::quantile(s.samples, 0.50);
      s.p75 = stats::quantile(s.samples, 0.75);
      s.converged_fraction = converged / count;
      s.mean_periods = periods / count;
    }
    stats.regimes.push_back(std::move(s));
    if (e.regime.kind() == RegimeKind::LaxUninformed && benchmark == nullptr) benchmark = &e;
  }
  if (benchmark == nullptr) throw Error("evaluation needs the lax_uninformed benchmark");

  const auto& bench = stats.summary(RegimeKind::LaxUninformed);
  for (const auto& s : stats.regimes) {
    if (s.kind == RegimeKind::LaxUninformed) continue;
    Comparison c{s.kind, 0.0, {}};
    c.efficiency_gain = bench.mean - s.mean;
    if (bench.samples.size() >= 2 && s.samples.size() >= 2) c.welch = stats::welch_t_test(bench.samples, s.samples);
    stats.comparisons.push_back(c);
  }
  return stats;
}

EnsembleStats evaluate_regimes(const CountryConfig& cfg, const std::vector<PolicyRegime>& regimes,
                               std::size_t runs, std::uint64_t master_seed, const RunOptions& options,
                               unsigned threads) {
  return summarize(simulate_ensembles(cfg, regimes, runs, master_seed, options, threads));
}

std::vector<PolicyRegime> standard_regimes(const Vector& discovered, double budget,
                                           const std::vector<RegimeKind>& kinds) {
  std::vector<PolicyRegime> regimes;
  for (RegimeKind k : kinds) {
    regimes.push_back(is_informed(k) ? PolicyRegime(k, discovered, budget) : PolicyRegime::arbitrary(k));
  }
  return regimes;
}

PillarGains pillar_gains(const std::vector<RunResult>& benchmark, const std::vector<RunResult>& alternative,
                         const PillarMap& pillars) {
  const std::size_t m = pillars.pillars().size();
  auto pillar_means = [&](const std::vector<RunResult>& runs) {
    Vector sums(m, 0.0);
    for (const auto& r : runs) {
      if (r.per_issue_diversion.size() != pillars.issues()) {
        throw Error(fmt::format("pillar map covers {} indicators but runs have {}", pillars.issues(),
                                r.per_issue_diversion.size()));
      }
      for (std::size_t i = 0; i < r.per_issue_diversion.size(); ++i) {
        sums[pillars.pillar_index(i)] += r.per_issue_diversion[i];
      }
    }
    if (!runs.empty()) {
      for (auto& s : sums) s /= static_cast<double>(runs.size());
    }
    return sums;
  };
  const Vector bench = pillar_means(benchmark);
  const Vector alt = pillar_means(alternative);

  PillarGains g;
  g.pillars = pillars.pillars();
  g.raw.resize(m);
  g.per_indicator.resize(m);
  for (std::size_t p = 0; p < m; ++p) {
    g.raw[p] = bench[p] - alt[p];
    g.per_indicator[p] = g.raw[p] / static_cast<double>(pillars.pillar_size(p));
  }
  return g;
}

std::vector<std::size_t> ward_clusters(const Matrix& features, std::size_t k) {
  const std::size_t n = features.rows();
  const std::size_t dim = features.cols();
  if (k == 0) throw Error("ward_clusters needs k >= 1");
  if (k > n) throw Error(fmt::format("cannot form {} clusters from {} rows", k, n));

  struct Cluster {
    Vector centroid;
    double size;
    std::vector<std::size_t> members;
  };
  std::vector<Cluster> clusters;
  clusters.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    Vector c(dim);
    for (std::size_t d = 0; d < dim; ++d) c[d] = features(r, d);
    clusters.push_back({std::move(c), 1.0, {r}});
  }

  // Increase in within-cluster sum of squares when merging a and b.
  auto merge_cost = [&](const Cluster& a, const Cluster& b) {
    double dist2 = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = a.centroid[d] - b.centroid[d];
      dist2 += diff * diff;
    }
    return a.size * b.size / (a.size + b.size) * dist2;
  };

  while (clusters.size() > k) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_a = 0;
    std::size_t best_b = 1;
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        const double cost = merge_cost(clusters[a], clusters[b]);
        if (cost < best) {
          best = cost;
          best_a = a;
          best_b = b;
        }
      }
    }
    Cluster& a = clusters[best_a];
    Cluster& b = clusters[best_b];
    const double total = a.size + b.size;
    for (std::size_t d = 0; d < dim; ++d) a.centroid[d] = (a.size * a.centroid[d] + b.size * b.centroid[d]) / total;
    a.size = total;
    a.members.insert(a.members.end(), b.members.begin(), b.members.end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_b));
  }

  for (auto& c : clusters) std::sort(c.members.begin(), c.members.end());
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& x, const Cluster& y) { return x.members.front() < y.members.front(); });
  std::vector<std::size_t> labels(n);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (std::size_t r : clusters[c].members) labels[r] = c;
  }
  return labels;
}

double simulated_corruption_score(const CountryConfig& cfg, std::size_t runs, std::uint64_t seed,
                                  std::uint64_t stream, const RunOptions& options, unsigned threads) {
  const auto seeds = make_seeds(seed, stream, runs);
  const auto results = sweep(cfg, PolicyRegime::arbitrary(RegimeKind::LaxUninformed), seeds, options, threads);
  double total = 0.0;
  for (const auto& r : results) total += r.corruption_per_period();
  return results.empty() ? 0.0 : total / static_cast<double>(results.size());
}

CalibrationResult calibrate_gamma(const std::vector<CalibrationTarget>& countries, const std::vector<double>& grid,
                                  std::size_t runs_per_point, std::uint64_t seed, const RunOptions& options,
                                  unsigned threads) {
  if (grid.empty()) throw Error("calibration grid is empty");
  for (double g : grid) {
    if (!(g > 0.0)) throw Error(fmt::format("calibration grid point {} is not positive", g));
  }
  if (countries.empty()) throw Error("calibration needs at least one country");

  CalibrationResult result;
  result.objective = std::numeric_limits<double>::infinity();
  for (double gamma : grid) {
    double sse = 0.0;
    for (std::size_t c = 0; c < countries.size(); ++c) {
      const auto cfg = countries[c].config.with_gamma(gamma);
      const double simulated =
          simulated_corruption_score(cfg, runs_per_point, seed, streams::kCalibration + c, options, threads);
      const double diff = simulated - countries[c].empirical_corruption;
      sse += diff * diff;
    }
    const double objective = sse / static_cast<double>(countries.size());
    result.grid.emplace_back(gamma, objective);
    if (objective < result.objective) {
      result.objective = objective;
      result.gamma = gamma;
    }
  }
  return result;
}

}  // namespace ppsim::analysis
