#include "ppsim/cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ppsim/io.hpp"
#include "ppsim/pipeline.hpp"

namespace ppsim {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

enum ExitCode { kOk = 0, kRuntime = 1, kUsage = 2, kManifest = 3, kIo = 4, kConfig = 5 };

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::string> out;
  std::optional<std::size_t> max_periods;
  std::optional<double> tolerance;
  std::optional<std::string> regimes;
  std::optional<std::size_t> k;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--runs", o.runs, "Simulations per regime and country")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--max-periods", o.max_periods, "Period cap per run")->check(CLI::PositiveNumber);
  cmd->add_option("--tolerance", o.tolerance, "Convergence tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--regimes", o.regimes, "Comma-separated regimes, e.g. lax_uninformed,strict_informed");
  cmd->add_option("--k", o.k, "Number of Ward clusters")->check(CLI::PositiveNumber);
}

// Flags are folded into the manifest JSON, and the hash covers those that
// change results, so the provenance line identifies the effective configuration.
io::RunManifest load_with_overrides(const fs::path& path, const Overrides& o) {
  const std::string text = io::read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw io::ManifestError(fmt::format("manifest '{}' is not valid JSON: {}", path.string(), e.what()));
  }
  if (!j.is_object()) throw io::ManifestError(fmt::format("manifest '{}' must be a JSON object", path.string()));

  json applied = json::object();
  if (o.seed) applied["master_seed"] = *o.seed;
  if (o.runs) {
    applied["n_runs"] = *o.runs;
    applied["discovery_runs"] = *o.runs;
  }
  if (o.max_periods) applied["max_periods"] = *o.max_periods;
  if (o.tolerance) applied["tolerance"] = *o.tolerance;
  if (o.k) applied["clusters"] = *o.k;
  if (o.regimes) {
    json list = json::array();
    std::stringstream ss(*o.regimes);
    for (std::string item; std::getline(ss, item, ',');) {
      if (!item.empty()) list.push_back(item);
    }
    applied["regimes"] = list;
  }
  for (const auto& [key, value] : applied.items()) j[key] = value;
  // The output location does not affect results, so it stays out of the hash.
  if (o.out) j["output"] = fs::absolute(*o.out).string();

  const std::string hashed = applied.empty() ? text : text + "\n" + applied.dump();
  auto m = io::parse_manifest(j, fs::absolute(path).parent_path(), io::fnv1a_hex(hashed));
  m.source = path;
  return m;
}

void fail(std::ostream& err, const char* kind, const std::string& message) {
  std::string flat = message;
  for (auto& c : flat) {
    if (c == '\n') c = ';';
  }
  err << "ppsim: error: " << kind << ": " << flat << "\n";
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Policy prioritization under corruption: simulation and evaluation"};
  app.name("ppsim");
  app.require_subcommand(1);

  // estimate-network
  std::string panel_path;
  std::string net_out = ".";
  std::optional<std::string> net_country;
  bool net_signed = false;
  std::uint64_t net_seed = 0;
  auto* est = app.add_subcommand("estimate-network", "Estimate spillover networks from an indicator panel");
  est->add_option("panel", panel_path, "Panel CSV")->required();
  est->add_option("--out", net_out, "Output directory");
  est->add_option("--country", net_country, "Only this country");
  est->add_flag("--signed", net_signed, "Keep the correlation sign as edge weight");
  est->add_option("--seed", net_seed, "Seed recorded in the provenance line");

  // manifest-driven commands
  std::string manifest_path;
  Overrides overrides;
  std::vector<CLI::App*> manifest_cmds;
  for (auto [name, help] : {std::pair{"discover", "Discover expected allocation profiles"},
                            std::pair{"simulate", "Run simulations and write per-run results"},
                            std::pair{"evaluate", "Evaluate all regimes against the benchmark"},
                            std::pair{"calibrate", "Grid-search gamma against empirical corruption"}}) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("manifest", manifest_path, "Run manifest (JSON)")->required();
    add_override_flags(cmd, overrides);
    manifest_cmds.push_back(cmd);
  }

  std::string features_path;
  std::size_t k = 4;
  std::string cluster_out = ".";
  auto* clu = app.add_subcommand("cluster", "Ward clustering of country features");
  clu->add_option("features", features_path, "Features CSV")->required();
  clu->add_option("--k", k, "Number of clusters")->check(CLI::PositiveNumber);
  clu->add_option("--out", cluster_out, "Output directory");

  std::string results_dir;
  auto* rep = app.add_subcommand("report", "Summary tables from an evaluate output directory");
  rep->add_option("results", results_dir, "Directory written by evaluate")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    fail(err, "usage", e.what());
    return kUsage;
  }

  try {
    if (est->parsed()) {
      const auto written = pipeline::estimate_networks(panel_path, net_out, net_country, net_signed, net_seed);
      for (const auto& p : written) out << p.string() << "\n";
    } else if (clu->parsed()) {
      const auto labels = pipeline::cluster(features_path, k, cluster_out);
      out << (fs::path(cluster_out) / "clusters.csv").string() << "\n";
      (void)labels;
    } else if (rep->parsed()) {
      out << pipeline::report(results_dir);
    } else {
      const auto m = load_with_overrides(manifest_path, overrides);
      const std::string cmd = app.get_subcommands().front()->get_name();
      if (cmd == "discover") {
        pipeline::discover(m);
      } else if (cmd == "simulate") {
        pipeline::simulate(m);
      } else if (cmd == "evaluate") {
        pipeline::evaluate(m);
      } else {
        const auto r = pipeline::calibrate(m);
        out << fmt::format("gamma={} objective={}\n", io::format_number(r.gamma), io::format_number(r.objective));
      }
      out << m.output.string() << "\n";
    }
  } catch (const io::ManifestError& e) {
    fail(err, "manifest", e.what());
    return kManifest;
  } catch (const io::IoError& e) {
    fail(err, "io", e.what());
    return kIo;
  } catch (const ConfigError& e) {
    fail(err, "config", e.what());
    return kConfig;
  } catch (const DimensionError& e) {
    fail(err, "config", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    fail(err, "runtime", e.what());
    return kRuntime;
  }
  return kOk;
}

}  // namespace ppsim
