#include "ppsim/fixture.hpp"

#include <array>
#include <cmath>

#include <fmt/format.h>

#include "json.hpp"
#include "ppsim/analysis.hpp"
#include "ppsim/io.hpp"
#include "ppsim/pipeline.hpp"
#include "ppsim/rng.hpp"

namespace ppsim::fixture {

namespace {

using nlohmann::json;

struct IndicatorSpec {
  const char* label;
  const char* pillar;
  double lo;  // raw value at latent 0
  double hi;  // raw value at latent 1
  bool reversed;
};

// Reversed indicators have lo > hi in raw units: more is worse.
constexpr std::array<IndicatorSpec, 20> kIndicators{{
    {"rule_of_law", "governance", -2.5, 2.5, false},
    {"control_of_corruption", "governance", -2.5, 2.5, false},
    {"voice_accountability", "governance", -2.5, 2.5, false},
    {"regulatory_quality", "governance", -2.5, 2.5, false},
    {"life_expectancy", "health", 40.0, 85.0, false},
    {"infant_mortality", "health", 120.0, 2.0, true},
    {"immunization", "health", 30.0, 99.0, false},
    {"health_access", "health", 10.0, 100.0, false},
    {"primary_enrollment", "education", 40.0, 100.0, false},
    {"secondary_enrollment", "education", 10.0, 100.0, false},
    {"literacy", "education", 20.0, 100.0, false},
    {"pupil_teacher_ratio", "education", 70.0, 10.0, true},
    {"gdp_per_capita", "economy", 300.0, 60000.0, false},
    {"inflation", "economy", 40.0, 0.5, true},
    {"unemployment", "economy", 30.0, 2.0, true},
    {"exports", "economy", 5.0, 80.0, false},
    {"electricity_access", "infrastructure", 5.0, 100.0, false},
    {"water_access", "infrastructure", 20.0, 100.0, false},
    {"internet_use", "infrastructure", 0.5, 95.0, false},
    {"road_density", "infrastructure", 1.0, 200.0, false},
}};

constexpr std::size_t kPillars = 5;
constexpr std::size_t kYears = 11;
constexpr int kFirstYear = 2006;

// Planted groups: latent development level, governance discount, decade trend.
struct GroupSpec {
  double level;
  double governance;
  double trend;
  const char* corruption;
};
constexpr std::array<GroupSpec, 4> kGroups{{
    {0.20, 0.06, 0.10, "high"},
    {0.38, 0.12, 0.12, "high"},
    {0.55, 0.20, 0.11, "medium"},
    {0.72, 0.75, 0.08, "low"},
}};

constexpr std::array<const char*, 12> kNames{{"Aldera", "Brisco", "Corvane", "Dunmore", "Eskal", "Fenwick", "Galloway",
                                              "Harth", "Istrova", "Jorvik", "Kelmar", "Lusina"}};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Latent pillar factors: pillar p is driven by its own Laplace shocks plus the
// previous value of pillar p-1, giving the networks a directional structure.
std::array<std::array<double, kYears>, kPillars> pillar_factors(Rng& rng) {
  std::array<std::array<double, kYears>, kPillars> f{};
  for (std::size_t t = 0; t < kYears; ++t) {
    for (std::size_t p = 0; p < kPillars; ++p) {
      const double prev = t > 0 ? f[p][t - 1] : 0.0;
      const double driver = (p > 0 && t > 0) ? f[p - 1][t - 1] : 0.0;
      f[p][t] = 0.4 * prev + 0.5 * driver + rng.laplace();
    }
  }
  return f;
}

}  // namespace

std::vector<FixtureCountry> fixture_countries() {
  std::vector<FixtureCountry> out;
  for (std::size_t c = 0; c < kNames.size(); ++c) out.push_back({kNames[c], c / 3, kGroups[c / 3].corruption});
  return out;
}

void write_fixture(const fs::path& dir, std::uint64_t seed) {
  Rng rng(seed);
  const auto countries = fixture_countries();

  std::string panel = "country,year";
  for (const auto& ind : kIndicators) panel += std::string(",") + ind.label;
  panel += "\n";

  std::string groups = "country,group,corruption\n";
  json budgets = json::object();
  for (std::size_t c = 0; c < countries.size(); ++c) {
    const auto& g = kGroups[countries[c].group];
    groups += fmt::format("{},{},{}\n", countries[c].name, countries[c].group + 1, countries[c].corruption);
    budgets[countries[c].name] = std::round((0.20 + 0.02 * static_cast<double>(c % 6)) * 100.0) / 100.0;

    std::array<double, kIndicators.size()> base{};
    std::array<double, kIndicators.size()> trend{};
    for (std::size_t k = 0; k < kIndicators.size(); ++k) {
      const bool governance = k < 4;
      base[k] = (governance ? g.governance : g.level) + 0.06 * (rng.uniform() - 0.5);
      trend[k] = g.trend * (0.5 + rng.uniform());
    }
    const auto factors = pillar_factors(rng);
    for (std::size_t t = 0; t < kYears; ++t) {
      panel += fmt::format("{},{}", countries[c].name, kFirstYear + static_cast<int>(t));
      for (std::size_t k = 0; k < kIndicators.size(); ++k) {
        const double share = static_cast<double>(t) / static_cast<double>(kYears - 1);
        double x = base[k] + trend[k] * share + 0.008 * factors[k / 4][t] + 0.004 * rng.laplace();
        x = std::clamp(x, 0.0, 1.0);
        const auto& ind = kIndicators[k];
        const double raw = ind.lo + (ind.hi - ind.lo) * x;
        // Sparse gaps in interior years only, so initial and target rows are observed.
        const bool missing = t > 0 && t + 1 < kYears && rng.uniform() < 0.01;
        panel += missing ? std::string(",NA") : "," + io::format_number(raw);
      }
      panel += "\n";
    }
  }

  std::string polarity = "indicator,reversed\n";
  std::string pillars = "indicator,pillar\n";
  for (const auto& ind : kIndicators) {
    polarity += fmt::format("{},{}\n", ind.label, ind.reversed ? 1 : 0);
    pillars += fmt::format("{},{}\n", ind.label, ind.pillar);
  }

  const json manifest = {
      {"panel", "panel.csv"},
      {"polarity", "polarity.csv"},
      {"pillars", "pillars.csv"},
      {"normalize", true},
      {"regimes", {"lax_uninformed", "strict_uninformed", "lax_informed", "strict_informed"}},
      {"n_runs", 1000},
      {"discovery_runs", 1000},
      {"master_seed", 42},
      {"gamma", 10.0},
      {"budget", budgets},
      {"rule_of_law", "rule_of_law"},
      {"control_of_corruption", "control_of_corruption"},
      {"output", "out"},
      {"max_periods", 1000},
      {"tolerance", 1e-4},
      {"clusters", 4},
  };

  // A single-country panel over the first ten indicators.
  std::string panel10 = "year";
  for (std::size_t k = 0; k < 10; ++k) panel10 += std::string(",") + kIndicators[k].label;
  panel10 += "\n";
  const auto factors = pillar_factors(rng);
  for (std::size_t t = 0; t < kYears; ++t) {
    panel10 += std::to_string(kFirstYear + static_cast<int>(t));
    for (std::size_t k = 0; k < 10; ++k) {
      const double x = 0.4 + 0.1 * static_cast<double>(t) / 10.0 + 0.02 * factors[k / 2][t] + 0.01 * rng.laplace();
      panel10 += "," + io::format_number(x);
    }
    panel10 += "\n";
  }

  io::write_file(dir / "panel.csv", panel);
  io::write_file(dir / "polarity.csv", polarity);
  io::write_file(dir / "pillars.csv", pillars);
  io::write_file(dir / "groups.csv", groups);
  io::write_file(dir / "manifest.json", dump(manifest));
  io::write_file(dir / "panel10.csv", panel10);
}

void write_calibration_fixture(const fs::path& dir, double true_gamma, std::uint64_t seed) {
  json manifest = json::parse(io::read_file(dir / "manifest.json"));
  manifest.erase("gamma");
  manifest.erase("clusters");
  manifest["countries"] = {"Aldera", "Dunmore", "Galloway", "Jorvik"};
  manifest["master_seed"] = seed + 1;
  json grid = json::array();
  for (int i = 1; i <= 11; ++i) grid.push_back(0.01 * i);
  manifest["calibration"] = {{"grid", grid}, {"empirical", "empirical.csv"}, {"runs_per_point", 50}};
  manifest["output"] = "out_calibration";

  // The manifest refers to empirical.csv, which must exist before loading;
  // write a placeholder, then the model-generated scores.
  io::write_file(dir / "empirical.csv", "country,corruption\n");
  io::write_file(dir / "manifest_calibration.json", dump(manifest));
  const auto m = io::load_manifest(dir / "manifest_calibration.json");
  const auto prepared = pipeline::prepare_countries(m);

  RunOptions options;
  options.tolerance = m.tolerance;
  std::string empirical = "country,corruption\n";
  for (std::size_t c = 0; c < prepared.size(); ++c) {
    const auto cfg = io::build_config(m, prepared[c].name, prepared[c].panel, prepared[c].network, true_gamma);
    const double score = analysis::simulated_corruption_score(cfg, 200, seed, streams::kCalibration + 1000 + c, options);
    empirical += fmt::format("{},{}\n", prepared[c].name, io::format_number(score));
  }
  io::write_file(dir / "empirical.csv", empirical);
}

}  // namespace ppsim::fixture
