#include "ppsim/pipeline.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "ppsim/rng.hpp"
#include "ppsim/simulation.hpp"
#include "ppsim/stats.hpp"

namespace ppsim::pipeline {

using nlohmann::json;

namespace {

std::string network_stem(const std::string& country) {
  return country.empty() ? "network" : "network_" + country;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

RunOptions run_options(const io::RunManifest& m) {
  RunOptions o;
  o.tolerance = m.tolerance;
  return o;
}

std::vector<CountryConfig> build_configs(const io::RunManifest& m, const std::vector<PreparedCountry>& countries,
                                         std::optional<double> gamma) {
  std::vector<CountryConfig> configs;
  configs.reserve(countries.size());
  for (const auto& c : countries) configs.push_back(io::build_config(m, c.name, c.panel, c.network, gamma));
  return configs;
}

std::vector<Vector> discover_all(const io::RunManifest& m, const std::vector<CountryConfig>& configs) {
  analysis::DiscoveryOptions opts;
  opts.run = run_options(m);
  std::vector<Vector> profiles;
  profiles.reserve(configs.size());
  for (const auto& cfg : configs) profiles.push_back(analysis::discover_profile(cfg, m.discovery_runs, m.master_seed, opts));
  return profiles;
}

json profiles_json(const io::RunManifest& m, const std::vector<PreparedCountry>& countries,
                   const std::vector<Vector>& profiles) {
  json out = {{"provenance", m.provenance().to_json()}, {"discovery_runs", m.discovery_runs}};
  json list = json::array();
  for (std::size_t c = 0; c < countries.size(); ++c) {
    list.push_back({{"country", countries[c].name},
                    {"labels", countries[c].panel.labels()},
                    {"profile", profiles[c]}});
  }
  out["countries"] = std::move(list);
  return out;
}

std::string profiles_csv(const io::RunManifest& m, const std::vector<PreparedCountry>& countries,
                         const std::vector<Vector>& profiles) {
  std::string out = m.provenance().csv_comment() + "country,indicator,allocation\n";
  for (std::size_t c = 0; c < countries.size(); ++c) {
    const auto& labels = countries[c].panel.labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
      out += fmt::format("{},{},{}\n", countries[c].name, labels[i], io::format_number(profiles[c][i]));
    }
  }
  return out;
}

double resolve_gamma(const io::RunManifest& m, std::optional<analysis::CalibrationResult>* calibration) {
  if (m.gamma) return *m.gamma;
  auto result = calibrate(m);
  if (calibration) *calibration = result;
  return result.gamma;
}

json calibration_json(const io::RunManifest& m, const analysis::CalibrationResult& r) {
  json grid = json::array();
  for (const auto& [g, obj] : r.grid) grid.push_back({{"gamma", g}, {"objective", obj}});
  return {{"provenance", m.provenance().to_json()}, {"gamma", r.gamma}, {"objective", r.objective}, {"grid", grid}};
}

}  // namespace

std::vector<PreparedCountry> prepare_countries(const io::RunManifest& m) {
  io::RawPanel raw = io::read_panel_csv(m.panel);
  if (m.normalize) {
    std::vector<bool> reversed(raw.labels.size(), false);
    if (m.polarity) reversed = io::read_polarity_csv(*m.polarity, raw.labels);
    raw = io::normalize_pooled(raw, reversed);
  }

  std::vector<std::string> names = m.countries;
  if (names.empty()) {
    for (const auto& c : raw.countries) names.push_back(c.country);
  }

  std::vector<PreparedCountry> out;
  out.reserve(names.size());
  for (const auto& name : names) {
    auto panel = io::to_indicator_panel(raw.country(name), raw.labels);
    network::DirectedSpilloverNetwork net;
    if (m.networks) {
      net = io::network_from_json(json::parse(io::read_file(*m.networks / (network_stem(name) + ".json"))));
    } else {
      net = network::estimate_network(panel, {m.signed_weights});
    }
    out.push_back({name, std::move(panel), std::move(net)});
  }
  return out;
}

Matrix country_features(const std::vector<PreparedCountry>& countries) {
  if (countries.empty()) return {};
  Matrix features(countries.size(), countries.front().panel.cols());
  for (std::size_t c = 0; c < countries.size(); ++c) {
    const auto& values = countries[c].panel.values();
    for (std::size_t k = 0; k < values.cols(); ++k) {
      double s = 0.0;
      for (std::size_t r = 0; r < values.rows(); ++r) s += values(r, k);
      features(c, k) = s / static_cast<double>(values.rows());
    }
  }
  return features;
}

std::vector<fs::path> estimate_networks(const fs::path& panel_csv, const fs::path& out_dir,
                                        const std::optional<std::string>& country, bool signed_weights,
                                        std::uint64_t seed) {
  const std::string text = io::read_file(panel_csv);
  const io::Provenance provenance{seed, io::fnv1a_hex(text)};
  const io::RawPanel raw = io::read_panel_csv(panel_csv);
  std::vector<fs::path> written;
  for (const auto& series : raw.countries) {
    if (country && series.country != *country) continue;
    const auto panel = io::to_indicator_panel(series, raw.labels);
    const auto net = network::estimate_network(panel, {signed_weights});
    const fs::path csv = out_dir / (network_stem(series.country) + ".csv");
    io::write_file(csv, io::edge_list_csv(net, provenance));
    io::write_file(out_dir / (network_stem(series.country) + ".json"), dump(io::network_json(net, provenance)));
    written.push_back(csv);
  }
  if (written.empty()) throw io::IoError(fmt::format("country '{}' not found in panel", country.value_or("")));
  return written;
}

void discover(const io::RunManifest& m) {
  const auto countries = prepare_countries(m);
  const double gamma = resolve_gamma(m, nullptr);
  const auto configs = build_configs(m, countries, gamma);
  const auto profiles = discover_all(m, configs);
  io::write_file(m.output / "discovered_profiles.json", dump(profiles_json(m, countries, profiles)));
  io::write_file(m.output / "discovered_profiles.csv", profiles_csv(m, countries, profiles));
}

void simulate(const io::RunManifest& m) {
  const auto countries = prepare_countries(m);
  const double gamma = resolve_gamma(m, nullptr);
  const auto configs = build_configs(m, countries, gamma);
  const bool needs_discovery = std::any_of(m.regimes.begin(), m.regimes.end(), is_informed);
  const auto profiles = needs_discovery ? discover_all(m, configs) : std::vector<Vector>{};

  std::string csv = m.provenance().csv_comment() + "country,regime,run,seed,corruption,periods,converged\n";
  json summary = json::array();
  const auto seeds = make_seeds(m.master_seed, streams::kEvaluation, m.n_runs);
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const Vector uniform(configs[c].n(), configs[c].budget() / static_cast<double>(configs[c].n()));
    const auto regimes =
        analysis::standard_regimes(needs_discovery ? profiles[c] : uniform, configs[c].budget(), m.regimes);
    for (const auto& regime : regimes) {
      const auto results = sweep(configs[c], regime, seeds, run_options(m));
      std::vector<double> ls;
      for (std::size_t r = 0; r < results.size(); ++r) {
        const auto& res = results[r];
        ls.push_back(res.corruption);
        csv += fmt::format("{},{},{},{},{},{},{}\n", countries[c].name, to_string(regime.kind()), r, seeds[r],
                           io::format_number(res.corruption), res.periods, res.converged ? 1 : 0);
      }
      summary.push_back({{"country", countries[c].name},
                         {"regime", to_string(regime.kind())},
                         {"mean_corruption", stats::mean(ls)}});
    }
  }
  io::write_file(m.output / "runs.csv", csv);
  io::write_file(m.output / "simulate.json",
                 dump({{"provenance", m.provenance().to_json()}, {"gamma", gamma}, {"n_runs", m.n_runs},
                       {"results", summary}}));
}

void evaluate(const io::RunManifest& m) {
  const auto countries = prepare_countries(m);
  std::optional<analysis::CalibrationResult> calibration;
  const double gamma = resolve_gamma(m, &calibration);
  const auto configs = build_configs(m, countries, gamma);

  std::vector<RegimeKind> kinds = m.regimes;
  if (std::find(kinds.begin(), kinds.end(), RegimeKind::LaxUninformed) == kinds.end()) {
    kinds.insert(kinds.begin(), RegimeKind::LaxUninformed);
  }
  const bool needs_discovery = std::any_of(kinds.begin(), kinds.end(), is_informed);
  const auto profiles = needs_discovery ? discover_all(m, configs) : std::vector<Vector>{};

  std::optional<analysis::PillarMap> pillars;
  if (m.pillars) pillars = io::read_pillar_csv(*m.pillars, countries.front().panel.labels());

  const auto provenance = m.provenance();
  json countries_json = json::array();
  std::string stats_csv = provenance.csv_comment() +
                          "country,regime,mean,p25,p50,p75,converged_fraction,mean_periods,efficiency_gain,t,df,p\n";
  std::string samples_csv = provenance.csv_comment() + "country,regime,run,corruption,periods,converged\n";
  std::string pillar_csv = provenance.csv_comment() + "country,alternative,pillar,raw,per_indicator\n";
  // (country, alternative) -> gains, kept for the grouped summary.
  std::vector<std::vector<std::pair<RegimeKind, analysis::PillarGains>>> gains_by_country(countries.size());

  for (std::size_t c = 0; c < configs.size(); ++c) {
    const auto& cfg = configs[c];
    const Vector uniform(cfg.n(), cfg.budget() / static_cast<double>(cfg.n()));
    const auto regimes = analysis::standard_regimes(needs_discovery ? profiles[c] : uniform, cfg.budget(), kinds);
    const auto ensembles = analysis::simulate_ensembles(cfg, regimes, m.n_runs, m.master_seed, run_options(m));
    const auto st = analysis::summarize(ensembles);

    json regimes_json = json::array();
    for (const auto& s : st.regimes) {
      regimes_json.push_back({{"regime", to_string(s.kind)},
                              {"mean", s.mean},
                              {"p25", s.p25},
                              {"p50", s.p50},
                              {"p75", s.p75},
                              {"converged_fraction", s.converged_fraction},
                              {"mean_periods", s.mean_periods}});
      const Comparison* cmp = nullptr;
      for (const auto& x : st.comparisons) {
        if (x.alternative == s.kind) cmp = &x;
      }
      stats_csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", countries[c].name, to_string(s.kind),
                               io::format_number(s.mean), io::format_number(s.p25), io::format_number(s.p50),
                               io::format_number(s.p75), io::format_number(s.converged_fraction),
                               io::format_number(s.mean_periods), cmp ? io::format_number(cmp->efficiency_gain) : "",
                               cmp ? io::format_number(cmp->welch.t) : "", cmp ? io::format_number(cmp->welch.df) : "",
                               cmp ? io::format_number(cmp->welch.p) : "");
    }
    json comparisons_json = json::array();
    for (const auto& x : st.comparisons) {
      comparisons_json.push_back({{"alternative", to_string(x.alternative)},
                                  {"efficiency_gain", x.efficiency_gain},
                                  {"t", x.welch.t},
                                  {"df", x.welch.df},
                                  {"p", x.welch.p}});
    }
    json entry = {{"country", countries[c].name},
                  {"budget", cfg.budget()},
                  {"regimes", regimes_json},
                  {"comparisons", comparisons_json}};

    const auto& bench = ensembles.front();
    for (const auto& e : ensembles) {
      for (std::size_t r = 0; r < e.runs.size(); ++r) {
        samples_csv += fmt::format("{},{},{},{},{},{}\n", countries[c].name, to_string(e.regime.kind()), r,
                                   io::format_number(e.runs[r].corruption), e.runs[r].periods,
                                   e.runs[r].converged ? 1 : 0);
      }
      if (!pillars || e.regime.kind() == RegimeKind::LaxUninformed) continue;
      auto g = analysis::pillar_gains(bench.runs, e.runs, *pillars);
      json pillar_entries = json::array();
      for (std::size_t p = 0; p < g.pillars.size(); ++p) {
        pillar_csv += fmt::format("{},{},{},{},{}\n", countries[c].name, to_string(e.regime.kind()), g.pillars[p],
                                  io::format_number(g.raw[p]), io::format_number(g.per_indicator[p]));
        pillar_entries.push_back({{"pillar", g.pillars[p]}, {"raw", g.raw[p]}, {"per_indicator", g.per_indicator[p]}});
      }
      entry["pillar_gains"][std::string(to_string(e.regime.kind()))] = pillar_entries;
      gains_by_country[c].emplace_back(e.regime.kind(), std::move(g));
    }
    countries_json.push_back(std::move(entry));
  }

  json stats_json = {{"provenance", provenance.to_json()},
                     {"gamma", gamma},
                     {"n_runs", m.n_runs},
                     {"discovery_runs", m.discovery_runs},
                     {"benchmark", to_string(RegimeKind::LaxUninformed)},
                     {"countries", countries_json}};
  if (calibration) stats_json["calibration"] = calibration_json(m, *calibration);

  // Country features and optional Ward groups.
  const Matrix features = country_features(countries);
  std::string features_csv = provenance.csv_comment() + "country";
  for (const auto& l : countries.front().panel.labels()) features_csv += "," + l;
  features_csv += "\n";
  for (std::size_t c = 0; c < countries.size(); ++c) {
    features_csv += countries[c].name;
    for (std::size_t k = 0; k < features.cols(); ++k) features_csv += "," + io::format_number(features(c, k));
    features_csv += "\n";
  }
  io::write_file(m.output / "country_features.csv", features_csv);

  std::vector<std::size_t> groups(countries.size(), 0);
  if (m.clusters) {
    groups = analysis::ward_clusters(features, *m.clusters);
    std::string clusters_csv = provenance.csv_comment() + "country,cluster\n";
    json cl = json::object();
    for (std::size_t c = 0; c < countries.size(); ++c) {
      clusters_csv += fmt::format("{},{}\n", countries[c].name, groups[c] + 1);
      cl[countries[c].name] = groups[c] + 1;
    }
    io::write_file(m.output / "clusters.csv", clusters_csv);
    stats_json["clusters"] = cl;
  }

  if (pillars) {
    // Mean pillar gains over all countries ("all") and over each cluster.
    std::string summary = provenance.csv_comment() + "group,alternative,pillar,raw,per_indicator\n";
    const std::size_t n_groups = m.clusters ? *m.clusters : 0;
    for (std::size_t grp = 0; grp <= n_groups; ++grp) {
      const std::string label = grp == 0 ? "all" : fmt::format("cluster_{}", grp);
      for (RegimeKind alt : kinds) {
        if (alt == RegimeKind::LaxUninformed) continue;
        Vector raw(pillars->pillars().size(), 0.0);
        Vector per(pillars->pillars().size(), 0.0);
        double members = 0.0;
        for (std::size_t c = 0; c < countries.size(); ++c) {
          if (grp != 0 && groups[c] + 1 != grp) continue;
          for (const auto& [kind, g] : gains_by_country[c]) {
            if (kind != alt) continue;
            for (std::size_t p = 0; p < raw.size(); ++p) {
              raw[p] += g.raw[p];
              per[p] += g.per_indicator[p];
            }
            members += 1.0;
          }
        }
        if (members == 0.0) continue;
        for (std::size_t p = 0; p < raw.size(); ++p) {
          summary += fmt::format("{},{},{},{},{}\n", label, to_string(alt), pillars->pillars()[p],
                                 io::format_number(raw[p] / members), io::format_number(per[p] / members));
        }
      }
    }
    io::write_file(m.output / "pillar_gains.csv", pillar_csv);
    io::write_file(m.output / "pillar_gains_summary.csv", summary);
  }

  if (needs_discovery) {
    io::write_file(m.output / "discovered_profiles.json", dump(profiles_json(m, countries, profiles)));
  }
  io::write_file(m.output / "ensemble_stats.json", dump(stats_json));
  io::write_file(m.output / "ensemble_stats.csv", stats_csv);
  io::write_file(m.output / "samples.csv", samples_csv);
}

analysis::CalibrationResult calibrate(const io::RunManifest& m) {
  if (!m.calibration) throw io::ManifestError("calibrate needs a 'calibration' block in the manifest");
  const auto countries = prepare_countries(m);
  const auto empirical = io::read_empirical_csv(m.calibration->empirical);
  const double placeholder_gamma = m.calibration->grid.front();

  std::vector<analysis::CalibrationTarget> targets;
  for (const auto& c : countries) {
    const auto it = empirical.find(c.name);
    if (it == empirical.end()) throw io::IoError(fmt::format("no empirical corruption score for '{}'", c.name));
    targets.push_back({io::build_config(m, c.name, c.panel, c.network, placeholder_gamma), it->second});
  }
  const auto result =
      analysis::calibrate_gamma(targets, m.calibration->grid, m.calibration->runs_per_point, m.master_seed, run_options(m));

  std::string csv = m.provenance().csv_comment() + "gamma,objective\n";
  for (const auto& [g, obj] : result.grid) csv += fmt::format("{},{}\n", io::format_number(g), io::format_number(obj));
  io::write_file(m.output / "calibration.csv", csv);
  io::write_file(m.output / "calibration.json", dump(calibration_json(m, result)));
  return result;
}

std::vector<std::size_t> cluster(const fs::path& features_csv, std::size_t k, const fs::path& out_dir) {
  const std::string text = io::read_file(features_csv);
  const auto table = io::parse_csv(text);
  if (table.header.size() < 2) throw io::IoError("features CSV needs a label column and at least one feature");
  Matrix features(table.rows.size(), table.header.size() - 1);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t c = 1; c < table.header.size(); ++c) {
      try {
        features(r, c - 1) = std::stod(table.rows[r][c]);
      } catch (const std::exception&) {
        throw io::IoError(fmt::format("features row {}: '{}' is not a number", r + 1, table.rows[r][c]));
      }
    }
  }
  const auto labels = analysis::ward_clusters(features, k);
  const io::Provenance provenance{0, io::fnv1a_hex(text)};
  std::string csv = provenance.csv_comment() + table.header.front() + ",cluster\n";
  for (std::size_t r = 0; r < labels.size(); ++r) csv += fmt::format("{},{}\n", table.rows[r][0], labels[r] + 1);
  io::write_file(out_dir / "clusters.csv", csv);
  return labels;
}

std::string report(const fs::path& results_dir) {
  const json stats = json::parse(io::read_file(results_dir / "ensemble_stats.json"));
  const auto& countries = stats.at("countries");

  struct Row {
    std::string country;
    std::map<std::string, json> regimes;
    std::map<std::string, json> comparisons;
  };
  std::vector<Row> rows;
  std::vector<std::string> regime_names;
  for (const auto& c : countries) {
    Row row{c.at("country").get<std::string>(), {}, {}};
    for (const auto& r : c.at("regimes")) {
      const auto name = r.at("regime").get<std::string>();
      if (std::find(regime_names.begin(), regime_names.end(), name) == regime_names.end()) regime_names.push_back(name);
      row.regimes[name] = r;
    }
    for (const auto& x : c.at("comparisons")) row.comparisons[x.at("alternative").get<std::string>()] = x;
    rows.push_back(std::move(row));
  }
  const std::string bench = stats.value("benchmark", std::string("lax_uninformed"));
  std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
    return a.regimes.at(bench).at("mean").get<double>() < b.regimes.at(bench).at("mean").get<double>();
  });

  const io::Provenance provenance{stats.at("provenance").at("seed").get<std::uint64_t>(),
                                  stats.at("provenance").at("manifest_hash").get<std::string>()};
  std::string csv = provenance.csv_comment() + "rank,country";
  for (const auto& r : regime_names) csv += fmt::format(",{0}_mean,{0}_p25,{0}_p50", r);
  for (const auto& r : regime_names) {
    if (r != bench) csv += fmt::format(",{0}_gain,{0}_p", r);
  }
  csv += "\n";

  std::ostringstream table;
  table << fmt::format("{:<4} {:<16}", "rank", "country");
  for (const auto& r : regime_names) table << fmt::format(" {:>18}", r);
  table << "\n";

  json report_rows = json::array();
  std::map<std::string, std::size_t> significant;
  std::map<std::string, std::size_t> positive_gain;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    csv += fmt::format("{},{}", i + 1, row.country);
    table << fmt::format("{:<4} {:<16}", i + 1, row.country);
    json jr = {{"rank", i + 1}, {"country", row.country}};
    for (const auto& r : regime_names) {
      const auto& s = row.regimes.at(r);
      csv += fmt::format(",{},{},{}", io::format_number(s.at("mean").get<double>()),
                         io::format_number(s.at("p25").get<double>()), io::format_number(s.at("p50").get<double>()));
      table << fmt::format(" {:>18.3f}", s.at("mean").get<double>());
      jr["mean"][r] = s.at("mean");
    }
    for (const auto& r : regime_names) {
      if (r == bench) continue;
      const auto& x = row.comparisons.at(r);
      const double gain = x.at("efficiency_gain").get<double>();
      const double p = x.at("p").get<double>();
      csv += fmt::format(",{},{}", io::format_number(gain), io::format_number(p));
      jr["gain"][r] = gain;
      jr["p"][r] = p;
      if (p < 0.05) ++significant[r];
      if (gain > 0.0) ++positive_gain[r];
    }
    csv += "\n";
    table << "\n";
    report_rows.push_back(std::move(jr));
  }

  json summary = json::object();
  table << "\n";
  for (const auto& r : regime_names) {
    if (r == bench) continue;
    summary[r] = {{"countries_with_gain", positive_gain[r]}, {"countries_significant", significant[r]}};
    table << fmt::format("{:<18} gain in {}/{} countries, p < 0.05 in {}/{}\n", r, positive_gain[r], rows.size(),
                         significant[r], rows.size());
  }
  io::write_file(results_dir / "report.csv", csv);
  io::write_file(results_dir / "report.json",
                 dump({{"provenance", provenance.to_json()}, {"rows", report_rows}, {"summary", summary}}));
  return table.str();
}

}  // namespace ppsim::pipeline
