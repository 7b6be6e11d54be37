#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ppsim::fixture {

namespace fs = std::filesystem;

struct FixtureCountry {
  std::string name;
  std::size_t group;        // planted group, 0..3
  std::string corruption;   // "high", "medium" or "low"
};

/// The synthetic countries in generation order.
std::vector<FixtureCountry> fixture_countries();

/// Writes the bundled synthetic fixture into `dir`:
///   panel.csv          12 countries x 11 years x 20 indicators, raw units, a few NA cells
///   polarity.csv       indicator,reversed
///   pillars.csv        indicator,pillar (5 pillars of 4)
///   groups.csv         country,group,corruption
///   manifest.json      evaluate/simulate/discover manifest with a fixed gamma
///   panel10.csv        single-country 10-indicator panel for estimate-network
/// Deterministic in `seed`.
void write_fixture(const fs::path& dir, std::uint64_t seed = 20240601);

/// Adds a calibration manifest and empirical.csv whose scores were produced by
/// the model itself at `true_gamma`. Requires write_fixture output in `dir`.
void write_calibration_fixture(const fs::path& dir, double true_gamma = 0.05, std::uint64_t seed = 7);

}  // namespace ppsim::fixture
