#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ppsim/analysis.hpp"
#include "ppsim/network.hpp"
#include "ppsim/types.hpp"

namespace ppsim::io {

namespace fs = std::filesystem;

class IoError : public Error {
 public:
  using Error::Error;
};

class ManifestError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// CSV

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  std::optional<std::size_t> find_column(const std::string& name) const;
};

/// Reads a comma-separated file with a header row. Lines starting with '#'
/// are comments; quoted fields may contain commas.
CsvTable read_csv(const fs::path& path);
CsvTable parse_csv(const std::string& text);

/// "{:.17g}"; round-trips every double.
std::string format_number(double x);

/// Provenance stamped on every output file.
struct Provenance {
  std::uint64_t seed = 0;
  std::string manifest_hash;  // 16 hex digits

  std::string csv_comment() const;  // "# ppsim seed=<seed> manifest=<hash>\n"
  nlohmann::json to_json() const;
};

/// FNV-1a 64 of a byte string, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);
std::string read_file(const fs::path& path);
void write_file(const fs::path& path, const std::string& contents);

// ---------------------------------------------------------------------------
// Panels

/// One country's raw series; NaN marks a missing cell.
struct CountrySeries {
  std::string country;
  std::vector<int> years;
  Matrix values;  // rows = years (ascending), cols = indicators
};

/// Indicator panel for one or more countries, as read from disk.
/// The CSV has a `year` column, an optional `country` column, and one column
/// per indicator. Empty cells and "NA" are missing.
struct RawPanel {
  std::vector<std::string> labels;
  std::vector<CountrySeries> countries;

  const CountrySeries& country(const std::string& name) const;
};

RawPanel read_panel_csv(const fs::path& path);
std::string panel_csv(const RawPanel& panel);

/// Per-indicator polarity flags: true means lower raw values are better.
/// Sidecar CSV with columns `indicator,reversed` (0/1).
std::vector<bool> read_polarity_csv(const fs::path& path, const std::vector<std::string>& labels);

/// Min-max normalization of each column of `raw` to [0,1]; reversed columns
/// are flipped so that higher is better. NaN cells pass through. Throws
/// Error on a column whose observed min equals its max.
Matrix normalize_panel(const Matrix& raw, const std::vector<bool>& reversed);

/// Pools every country's rows, normalizes across countries and years, and
/// splits the result back.
RawPanel normalize_pooled(const RawPanel& raw, const std::vector<bool>& reversed);

/// Imputes missing cells and returns the complete panel of one country.
network::IndicatorPanel to_indicator_panel(const CountrySeries& series, const std::vector<std::string>& labels);

// ---------------------------------------------------------------------------
// Networks, configs, auxiliary tables

std::string edge_list_csv(const network::DirectedSpilloverNetwork& net, const Provenance& provenance);
nlohmann::json network_json(const network::DirectedSpilloverNetwork& net, const Provenance& provenance);
network::DirectedSpilloverNetwork network_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const CountryConfig& cfg);
CountryConfig config_from_json(const nlohmann::json& j);

/// CSV with columns `indicator,pillar`, reordered to match `labels`.
analysis::PillarMap read_pillar_csv(const fs::path& path, const std::vector<std::string>& labels);

/// CSV with columns `country,corruption`.
std::map<std::string, double> read_empirical_csv(const fs::path& path);

// ---------------------------------------------------------------------------
// Manifest

struct CalibrationSpec {
  std::vector<double> grid;
  fs::path empirical;
  std::size_t runs_per_point = 100;
};

/// Everything a pipeline command needs. Paths are resolved against the
/// manifest's directory.
struct RunManifest {
  fs::path source;
  std::string hash;

  fs::path panel;
  std::optional<fs::path> polarity;
  std::optional<fs::path> networks;  // directory of network_<country>.json
  std::optional<fs::path> pillars;
  bool normalize = true;
  bool signed_weights = false;

  std::vector<std::string> countries;  // empty: every country in the panel
  std::vector<RegimeKind> regimes;
  std::size_t n_runs = 1000;
  std::size_t discovery_runs = 1000;
  std::uint64_t master_seed = 0;

  std::optional<double> gamma;
  std::optional<CalibrationSpec> calibration;

  double default_budget = 0.0;
  std::map<std::string, double> budgets;

  std::string rule_of_law_label;
  std::string control_of_corruption_label;
  fs::path output;
  std::size_t max_periods = 10000;
  double tolerance = 1e-4;
  std::optional<std::size_t> clusters;

  double budget_for(const std::string& country) const;
  Provenance provenance() const { return {master_seed, hash}; }
};

/// Parses and validates a manifest. Throws ManifestError listing problems.
RunManifest load_manifest(const fs::path& path);
RunManifest parse_manifest(const nlohmann::json& j, const fs::path& base_dir, std::string hash);

/// Initial levels from the earliest year, targets from the latest, budget and
/// gamma from the manifest, spillovers from `net`.
CountryConfig build_config(const RunManifest& manifest, const std::string& country,
                           const network::IndicatorPanel& panel, const network::DirectedSpilloverNetwork& net,
                           std::optional<double> gamma_override = std::nullopt);

}  // namespace ppsim::io
