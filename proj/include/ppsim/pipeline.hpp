#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ppsim/analysis.hpp"
#include "ppsim/io.hpp"
#include "ppsim/network.hpp"

namespace ppsim::pipeline {

namespace fs = std::filesystem;

struct PreparedCountry {
  std::string name;
  network::IndicatorPanel panel;  // normalized and imputed
  network::DirectedSpilloverNetwork network;
};

/// Loads the manifest's panel, normalizes it across countries and years,
/// imputes gaps, and attaches each selected country's spillover network
/// (read from the networks directory or estimated from the panel).
std::vector<PreparedCountry> prepare_countries(const io::RunManifest& manifest);

/// Per-country mean indicator level; the features Ward clustering uses.
Matrix country_features(const std::vector<PreparedCountry>& countries);

/// Writes network_<country>.csv / .json (network.csv / .json for a panel
/// without a country column). Returns the written CSV paths.
std::vector<fs::path> estimate_networks(const fs::path& panel_csv, const fs::path& out_dir,
                                        const std::optional<std::string>& country, bool signed_weights,
                                        std::uint64_t seed);

void discover(const io::RunManifest& manifest);
void simulate(const io::RunManifest& manifest);
void evaluate(const io::RunManifest& manifest);
analysis::CalibrationResult calibrate(const io::RunManifest& manifest);

/// Reads a features CSV (first column a label, the rest numeric) and writes
/// clusters.csv into out_dir.
std::vector<std::size_t> cluster(const fs::path& features_csv, std::size_t k, const fs::path& out_dir);

/// Summarizes an evaluate output directory into report.csv and report.json
/// and returns a printable table.
std::string report(const fs::path& results_dir);

}  // namespace ppsim::pipeline
