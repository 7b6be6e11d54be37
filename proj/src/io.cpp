#include "ppsim/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <boost/tokenizer.hpp>
#include <fmt/format.h>

namespace ppsim::io {

using nlohmann::json;

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_number(const std::string& cell, const std::string& context) {
  const std::string s = trim(cell);
  if (s.empty() || s == "NA" || s == "NaN" || s == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(fmt::format("{}: '{}' is not a number", context, s));
  }
}

int parse_int(const std::string& cell, const std::string& context) {
  const double v = parse_number(cell, context);
  if (!std::isfinite(v) || v != std::floor(v)) throw IoError(fmt::format("{}: '{}' is not an integer", context, cell));
  return static_cast<int>(v);
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

// ---------------------------------------------------------------------------
// CSV

std::optional<std::size_t> CsvTable::find_column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

std::size_t CsvTable::column(const std::string& name) const {
  if (auto c = find_column(name)) return *c;
  throw IoError(fmt::format("missing CSV column '{}'", name));
}

CsvTable parse_csv(const std::string& text) {
  using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;
  // Backslash is not an escape character in our files.
  const boost::escaped_list_separator<char> separator(std::string(), ",", "\"");
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    try {
      Tokenizer tok(line, separator);
      for (const auto& cell : tok) cells.push_back(trim(cell));
    } catch (const boost::escaped_list_error& e) {
      throw IoError(fmt::format("CSV line {}: {}", line_no, e.what()));
    }
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw IoError(fmt::format("CSV line {}: {} fields, header has {}", line_no, cells.size(), table.header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (!have_header) throw IoError("CSV has no header row");
  return table;
}

CsvTable read_csv(const fs::path& path) { return parse_csv(read_file(path)); }

std::string format_number(double x) { return fmt::format("{:.17g}", x); }

std::string Provenance::csv_comment() const {
  return fmt::format("# ppsim seed={} manifest={}\n", seed, manifest_hash);
}

json Provenance::to_json() const { return json{{"seed", seed}, {"manifest_hash", manifest_hash}}; }

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << contents;
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

// ---------------------------------------------------------------------------
// Panels

const CountrySeries& RawPanel::country(const std::string& name) const {
  for (const auto& c : countries) {
    if (c.country == name) return c;
  }
  throw IoError(fmt::format("country '{}' not found in panel", name));
}

RawPanel read_panel_csv(const fs::path& path) {
  const CsvTable table = read_csv(path);
  const std::size_t year_col = table.column("year");
  const auto country_col = table.find_column("country");

  RawPanel panel;
  std::vector<std::size_t> indicator_cols;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == year_col || (country_col && c == *country_col)) continue;
    panel.labels.push_back(table.header[c]);
    indicator_cols.push_back(c);
  }
  if (panel.labels.empty()) throw IoError(fmt::format("'{}' has no indicator columns", path.string()));

  std::map<std::string, std::vector<std::pair<int, std::vector<double>>>> by_country;
  std::vector<std::string> order;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string context = fmt::format("{} row {}", path.filename().string(), r + 1);
    const std::string country = country_col ? row[*country_col] : std::string();
    if (!by_country.count(country)) order.push_back(country);
    std::vector<double> values;
    values.reserve(indicator_cols.size());
    for (std::size_t c : indicator_cols) values.push_back(parse_number(row[c], context));
    by_country[country].emplace_back(parse_int(row[year_col], context), std::move(values));
  }

  for (const auto& name : order) {
    auto rows = by_country[name];
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    CountrySeries series{name, {}, Matrix(rows.size(), panel.labels.size())};
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r > 0 && rows[r].first == rows[r - 1].first) {
        throw IoError(fmt::format("duplicate year {} for country '{}'", rows[r].first, name));
      }
      series.years.push_back(rows[r].first);
      for (std::size_t c = 0; c < panel.labels.size(); ++c) series.values(r, c) = rows[r].second[c];
    }
    panel.countries.push_back(std::move(series));
  }
  return panel;
}

std::string panel_csv(const RawPanel& panel) {
  std::string out = "country,year";
  for (const auto& l : panel.labels) out += "," + quote_if_needed(l);
  out += "\n";
  for (const auto& c : panel.countries) {
    for (std::size_t r = 0; r < c.years.size(); ++r) {
      out += quote_if_needed(c.country) + "," + std::to_string(c.years[r]);
      for (std::size_t k = 0; k < panel.labels.size(); ++k) {
        const double v = c.values(r, k);
        out += ",";
        if (std::isfinite(v)) out += format_number(v);
      }
      out += "\n";
    }
  }
  return out;
}

std::vector<bool> read_polarity_csv(const fs::path& path, const std::vector<std::string>& labels) {
  const CsvTable table = read_csv(path);
  const std::size_t ind = table.column("indicator");
  const std::size_t rev = table.column("reversed");
  std::map<std::string, bool> flags;
  for (const auto& row : table.rows) flags[row[ind]] = parse_int(row[rev], "polarity") != 0;
  std::vector<bool> out(labels.size(), false);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (auto it = flags.find(labels[i]); it != flags.end()) out[i] = it->second;
  }
  return out;
}

Matrix normalize_panel(const Matrix& raw, const std::vector<bool>& reversed) {
  if (reversed.size() != raw.cols()) {
    throw DimensionError(fmt::format("{} polarity flags for {} columns", reversed.size(), raw.cols()));
  }
  Matrix out = raw;
  for (std::size_t c = 0; c < raw.cols(); ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < raw.rows(); ++r) {
      const double v = raw(r, c);
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!(hi > lo)) throw Error(fmt::format("column {} is constant or empty; cannot normalize", c));
    for (std::size_t r = 0; r < raw.rows(); ++r) {
      const double v = raw(r, c);
      if (!std::isfinite(v)) continue;
      const double x = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
      out(r, c) = reversed[c] ? 1.0 - x : x;
    }
  }
  return out;
}

RawPanel normalize_pooled(const RawPanel& raw, const std::vector<bool>& reversed) {
  std::size_t total = 0;
  for (const auto& c : raw.countries) total += c.values.rows();
  Matrix pooled(total, raw.labels.size());
  std::size_t r = 0;
  for (const auto& c : raw.countries) {
    for (std::size_t i = 0; i < c.values.rows(); ++i, ++r) {
      for (std::size_t k = 0; k < raw.labels.size(); ++k) pooled(r, k) = c.values(i, k);
    }
  }
  const Matrix normalized = normalize_panel(pooled, reversed);
  RawPanel out = raw;
  r = 0;
  for (auto& c : out.countries) {
    for (std::size_t i = 0; i < c.values.rows(); ++i, ++r) {
      for (std::size_t k = 0; k < raw.labels.size(); ++k) c.values(i, k) = normalized(r, k);
    }
  }
  return out;
}

network::IndicatorPanel to_indicator_panel(const CountrySeries& series, const std::vector<std::string>& labels) {
  Matrix values = series.values;
  for (std::size_t c = 0; c < values.cols(); ++c) {
    std::vector<double> col(values.rows());
    for (std::size_t r = 0; r < values.rows(); ++r) col[r] = values(r, c);
    if (!network::impute_series(col)) {
      throw IoError(fmt::format("indicator '{}' of country '{}' is more than half missing", labels[c],
                                series.country));
    }
    for (std::size_t r = 0; r < values.rows(); ++r) values(r, c) = col[r];
  }
  return network::IndicatorPanel(labels, series.years, std::move(values));
}

// ---------------------------------------------------------------------------
// Networks, configs, auxiliary tables

std::string edge_list_csv(const network::DirectedSpilloverNetwork& net, const Provenance& provenance) {
  std::string out = provenance.csv_comment();
  out += "source,target,weight\n";
  for (const auto& e : net.edges) {
    out += fmt::format("{},{},{}\n", quote_if_needed(net.labels[e.source]), quote_if_needed(net.labels[e.target]),
                       format_number(e.weight));
  }
  return out;
}

json network_json(const network::DirectedSpilloverNetwork& net, const Provenance& provenance) {
  json matrix = json::array();
  for (std::size_t i = 0; i < net.adjacency.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < net.adjacency.cols(); ++j) row.push_back(net.adjacency(i, j));
    matrix.push_back(std::move(row));
  }
  json edges = json::array();
  for (const auto& e : net.edges) {
    edges.push_back({{"source", net.labels[e.source]},
                     {"target", net.labels[e.target]},
                     {"weight", e.weight},
                     {"tie", e.tie}});
  }
  return json{{"provenance", provenance.to_json()}, {"labels", net.labels}, {"matrix", matrix}, {"edges", edges}};
}

network::DirectedSpilloverNetwork network_from_json(const json& j) {
  network::DirectedSpilloverNetwork net;
  try {
    net.labels = j.at("labels").get<std::vector<std::string>>();
    const std::size_t n = net.labels.size();
    net.adjacency = Matrix::square(n);
    const auto& rows = j.at("matrix");
    if (rows.size() != n) throw IoError("network matrix row count does not match labels");
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n) throw IoError("network matrix is not square");
      for (std::size_t k = 0; k < n; ++k) net.adjacency(i, k) = rows[i][k].get<double>();
    }
    auto index_of = [&](const std::string& label) {
      const auto it = std::find(net.labels.begin(), net.labels.end(), label);
      if (it == net.labels.end()) throw IoError(fmt::format("edge references unknown label '{}'", label));
      return static_cast<std::size_t>(it - net.labels.begin());
    };
    if (j.contains("edges")) {
      for (const auto& e : j.at("edges")) {
        net.edges.push_back({index_of(e.at("source").get<std::string>()), index_of(e.at("target").get<std::string>()),
                             e.at("weight").get<double>(), e.value("tie", false)});
      }
    }
  } catch (const json::exception& e) {
    throw IoError(fmt::format("malformed network JSON: {}", e.what()));
  }
  return net;
}

json config_to_json(const CountryConfig& cfg) {
  const auto& d = cfg.data();
  json adjacency = json::array();
  for (std::size_t i = 0; i < d.adjacency.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < d.adjacency.cols(); ++j) row.push_back(d.adjacency(i, j));
    adjacency.push_back(std::move(row));
  }
  return json{{"n", cfg.n()},
              {"labels", d.labels},
              {"initial_indicators", d.initial_indicators},
              {"targets", d.targets},
              {"adjacency", adjacency},
              {"budget", d.budget},
              {"gamma", d.gamma},
              {"rule_of_law_idx", d.rule_of_law_idx},
              {"control_of_corruption_idx", d.control_of_corruption_idx},
              {"max_periods", d.max_periods}};
}

CountryConfig config_from_json(const json& j) {
  ConfigData d;
  try {
    d.labels = j.value("labels", std::vector<std::string>{});
    d.initial_indicators = j.at("initial_indicators").get<Vector>();
    d.targets = j.at("targets").get<Vector>();
    const auto& rows = j.at("adjacency");
    d.adjacency = Matrix(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != d.adjacency.cols()) throw IoError("adjacency rows have different lengths");
      for (std::size_t k = 0; k < rows[i].size(); ++k) d.adjacency(i, k) = rows[i][k].get<double>();
    }
    d.budget = j.at("budget").get<double>();
    d.gamma = j.at("gamma").get<double>();
    d.rule_of_law_idx = j.at("rule_of_law_idx").get<std::size_t>();
    d.control_of_corruption_idx = j.at("control_of_corruption_idx").get<std::size_t>();
    d.max_periods = j.value("max_periods", std::size_t{10000});
  } catch (const json::exception& e) {
    throw IoError(fmt::format("malformed config JSON: {}", e.what()));
  }
  return CountryConfig::create(std::move(d));
}

analysis::PillarMap read_pillar_csv(const fs::path& path, const std::vector<std::string>& labels) {
  const CsvTable table = read_csv(path);
  const std::size_t ind = table.column("indicator");
  const std::size_t pil = table.column("pillar");
  std::map<std::string, std::string> pillar_of;
  for (const auto& row : table.rows) pillar_of[row[ind]] = row[pil];
  std::vector<std::string> ordered;
  ordered.reserve(labels.size());
  for (const auto& l : labels) {
    const auto it = pillar_of.find(l);
    if (it == pillar_of.end()) throw IoError(fmt::format("pillar map has no entry for indicator '{}'", l));
    ordered.push_back(it->second);
  }
  return analysis::PillarMap(std::move(ordered));
}

std::map<std::string, double> read_empirical_csv(const fs::path& path) {
  const CsvTable table = read_csv(path);
  const std::size_t country = table.column("country");
  const std::size_t value = table.column("corruption");
  std::map<std::string, double> out;
  for (const auto& row : table.rows) out[row[country]] = parse_number(row[value], "empirical corruption");
  return out;
}

// ---------------------------------------------------------------------------
// Manifest

double RunManifest::budget_for(const std::string& country) const {
  if (auto it = budgets.find(country); it != budgets.end()) return it->second;
  if (default_budget > 0.0) return default_budget;
  throw ManifestError(fmt::format("no budget for country '{}'", country));
}

RunManifest load_manifest(const fs::path& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ManifestError(fmt::format("manifest '{}' is not valid JSON: {}", path.string(), e.what()));
  }
  RunManifest m = parse_manifest(j, fs::absolute(path).parent_path(), fnv1a_hex(text));
  m.source = path;
  return m;
}

RunManifest parse_manifest(const json& j, const fs::path& base_dir, std::string hash) {
  RunManifest m;
  m.hash = std::move(hash);
  std::vector<std::string> problems;
  auto resolve = [&](const std::string& key) -> std::optional<fs::path> {
    if (!j.contains(key)) return std::nullopt;
    fs::path p = j.at(key).get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    if (!fs::exists(p)) problems.push_back(fmt::format("{}: path '{}' does not exist", key, p.string()));
    return p;
  };

  try {
    if (!j.is_object()) throw ManifestError("manifest must be a JSON object");
    if (auto p = resolve("panel")) {
      m.panel = *p;
    } else {
      problems.push_back("panel: required");
    }
    m.polarity = resolve("polarity");
    m.networks = resolve("networks");
    m.pillars = resolve("pillars");
    m.normalize = j.value("normalize", true);
    m.signed_weights = j.value("signed_weights", false);
    m.countries = j.value("countries", std::vector<std::string>{});

    if (j.contains("regimes")) {
      for (const auto& r : j.at("regimes")) {
        try {
          m.regimes.push_back(parse_regime_kind(r.get<std::string>()));
        } catch (const Error& e) {
          problems.push_back(std::string("regimes: ") + e.what());
        }
      }
    } else {
      m.regimes.assign(std::begin(kAllRegimes), std::end(kAllRegimes));
    }

    const auto n_runs = j.value("n_runs", std::int64_t{1000});
    if (n_runs < 1) problems.push_back("n_runs: must be >= 1");
    m.n_runs = static_cast<std::size_t>(std::max<std::int64_t>(n_runs, 1));
    const auto discovery = j.value("discovery_runs", static_cast<std::int64_t>(m.n_runs));
    if (discovery < 1) problems.push_back("discovery_runs: must be >= 1");
    m.discovery_runs = static_cast<std::size_t>(std::max<std::int64_t>(discovery, 1));
    m.master_seed = j.value("master_seed", std::uint64_t{0});

    if (j.contains("gamma")) m.gamma = j.at("gamma").get<double>();
    if (j.contains("calibration")) {
      const auto& c = j.at("calibration");
      CalibrationSpec spec;
      spec.grid = c.at("grid").get<std::vector<double>>();
      if (spec.grid.empty()) problems.push_back("calibration.grid: must not be empty");
      for (double g : spec.grid) {
        if (!(g > 0.0)) problems.push_back(fmt::format("calibration.grid: {} is not positive", g));
      }
      fs::path emp = c.at("empirical").get<std::string>();
      if (emp.is_relative()) emp = base_dir / emp;
      if (!fs::exists(emp)) problems.push_back(fmt::format("calibration.empirical: path '{}' does not exist", emp.string()));
      spec.empirical = emp;
      spec.runs_per_point = c.value("runs_per_point", std::size_t{100});
      m.calibration = std::move(spec);
    }
    if (m.gamma.has_value() == m.calibration.has_value()) {
      problems.push_back("exactly one of 'gamma' and 'calibration' must be present");
    }
    if (m.gamma && !(*m.gamma > 0.0)) problems.push_back("gamma: must be positive");

    if (!j.contains("budget")) {
      problems.push_back("budget: required");
    } else if (j.at("budget").is_number()) {
      m.default_budget = j.at("budget").get<double>();
      if (!(m.default_budget > 0.0)) problems.push_back("budget: must be positive");
    } else {
      for (const auto& [country, value] : j.at("budget").items()) {
        const double b = value.get<double>();
        if (!(b > 0.0)) problems.push_back(fmt::format("budget.{}: must be positive", country));
        if (country == "default") {
          m.default_budget = b;
        } else {
          m.budgets[country] = b;
        }
      }
    }

    m.rule_of_law_label = j.value("rule_of_law", std::string());
    m.control_of_corruption_label = j.value("control_of_corruption", std::string());
    if (m.rule_of_law_label.empty()) problems.push_back("rule_of_law: required");
    if (m.control_of_corruption_label.empty()) problems.push_back("control_of_corruption: required");

    fs::path out = j.value("output", std::string("out"));
    m.output = out.is_relative() ? base_dir / out : out;
    m.max_periods = j.value("max_periods", std::size_t{10000});
    if (m.max_periods == 0) problems.push_back("max_periods: must be positive");
    m.tolerance = j.value("tolerance", 1e-4);
    if (!(m.tolerance >= 0.0)) problems.push_back("tolerance: must be non-negative");
    if (j.contains("clusters")) m.clusters = j.at("clusters").get<std::size_t>();
  } catch (const json::exception& e) {
    problems.push_back(e.what());
  }

  if (!problems.empty()) {
    std::string msg = "invalid manifest";
    for (const auto& p : problems) msg += "; " + p;
    throw ManifestError(msg);
  }
  return m;
}

CountryConfig build_config(const RunManifest& manifest, const std::string& country,
                           const network::IndicatorPanel& panel, const network::DirectedSpilloverNetwork& net,
                           std::optional<double> gamma_override) {
  const std::size_t n = panel.cols();
  if (net.adjacency.rows() != n || net.labels.size() != n) {
    throw DimensionError(fmt::format("network for '{}' has {} nodes but the panel has {} indicators", country,
                                     net.labels.size(), n));
  }
  if (net.labels != panel.labels()) {
    throw DimensionError(fmt::format("network labels for '{}' do not match the panel columns", country));
  }
  ConfigData d;
  d.labels = panel.labels();
  d.initial_indicators = panel.row(0);
  d.targets = panel.row(panel.rows() - 1);
  d.adjacency = net.adjacency;
  d.budget = manifest.budget_for(country);
  if (gamma_override) {
    d.gamma = *gamma_override;
  } else if (manifest.gamma) {
    d.gamma = *manifest.gamma;
  } else {
    throw ManifestError("gamma is not set; run calibrate first");
  }
  d.rule_of_law_idx = panel.index_of(manifest.rule_of_law_label);
  d.control_of_corruption_idx = panel.index_of(manifest.control_of_corruption_label);
  d.max_periods = manifest.max_periods;
  return CountryConfig::create(std::move(d));
}

}  // namespace ppsim::io
