#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <unistd.h>

#include "dynpov/error.hpp"
#include "dynpov/estimation.hpp"
#include "dynpov/ingestion.hpp"
#include "dynpov/io.hpp"
#include "dynpov/simulation.hpp"

namespace dynpov::cli {
namespace {

constexpr const char* kSubcommands[] = {"estimate", "indexes",  "empirical",
                                        "simulate", "coverage", "forecast"};
constexpr const char* kValuedGlobals[] = {"--config", "--seed", "--out"};

double parse_number(std::string_view s, const char* what) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw Error(ErrorKind::InvalidArgument, std::string("bad ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingInput, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
}

std::string config_value(const Json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  if (v.is_array()) {
    std::string joined;
    for (const auto& x : v) {
      if (!joined.empty()) joined += ',';
      joined += config_value(x, key);
    }
    return joined;
  }
  throw Error(ErrorKind::InvalidArgument, "config key '" + key + "' has an unsupported type");
}

// Shared panel + threshold options of `estimate` and `empirical`.
struct PanelOptions {
  std::string panel;
  std::string thresholds;
  int base_components = 1;
  int base_year = 0;
  double extreme_fraction = 0.6;
  std::string waves;

  void add_to(CLI::App* sub) {
    sub->add_option("--panel", panel, "panel CSV: household_id,year,components,income");
    sub->add_option("--thresholds", thresholds, "threshold CSV: components,year,threshold");
    sub->add_option("--base-components", base_components, "household size of the base threshold");
    sub->add_option("--base-year", base_year, "year of the base threshold (default: first wave)");
    sub->add_option("--extreme-fraction", extreme_fraction, "y_ep as a fraction of y_p");
    sub->add_option("--waves", waves, "comma-separated wave years (default: all panel years)");
  }
};

struct LoadedPanel {
  std::vector<StandardizedRecord> records;
  std::vector<int> waves;
  PovertyThresholds thresholds{0.6, 1.0};
  std::size_t row_errors = 0;
};

LoadedPanel load_standardized(const PanelOptions& o, bool base_year_given, std::ostream& err) {
  if (o.thresholds.empty()) throw Error(ErrorKind::MissingThreshold, "--thresholds is required");
  if (o.panel.empty()) throw Error(ErrorKind::MissingInput, "--panel is required");
  const ThresholdTable table = load_thresholds(o.thresholds);
  const PanelLoad panel = load_panel(o.panel);
  for (const auto& e : panel.row_errors) {
    err << Json{{"warning", "ParseError"}, {"line", e.line}, {"message", e.message}}.dump() << '\n';
  }
  LoadedPanel out;
  out.row_errors = panel.row_errors.size();
  if (!o.waves.empty()) {
    for (auto part : split(o.waves, ',')) {
      out.waves.push_back(static_cast<int>(parse_number(part, "wave year")));
    }
    std::sort(out.waves.begin(), out.waves.end());
  } else {
    std::set<int> years;
    for (const auto& r : panel.records) years.insert(r.year);
    out.waves.assign(years.begin(), years.end());
  }
  if (out.waves.empty()) throw Error(ErrorKind::EmptyCohort, "panel has no usable records");
  const int base_year = base_year_given ? o.base_year : out.waves.front();
  out.records = standardize(panel.records, table, o.base_components, base_year);
  const double y_p = table.at(o.base_components, base_year);
  out.thresholds = PovertyThresholds(derive_extreme_threshold(y_p, o.extreme_fraction), y_p);
  return out;
}

IndexOptions index_options(const std::string& gini) {
  IndexOptions opts;
  opts.gini_numerator = gini_numerator_from_string(gini);
  return opts;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "alpha must be in (0, 1)");
  }
}

std::size_t resolve_n(const Json& model, std::optional<std::size_t> n) {
  if (n) {
    if (*n < 1) throw Error(ErrorKind::InvalidArgument, "--n must be >= 1");
    return *n;
  }
  if (model.contains("diagnostics") && model["diagnostics"].contains("households")) {
    return model["diagnostics"]["households"].get<std::size_t>();
  }
  throw Error(ErrorKind::InvalidArgument, "--n is required when the model has no household count");
}

std::optional<int> origin_year(const Json& model) {
  if (model.contains("origin_year") && model["origin_year"].is_number_integer()) {
    return model["origin_year"].get<int>();
  }
  return std::nullopt;
}

std::string csv(const std::vector<IndexRow>& rows, bool with_forecast, bool with_status) {
  std::ostringstream ss;
  write_index_csv(ss, rows, with_forecast, with_status);
  return ss.str();
}

}  // namespace

std::vector<double> parse_grid(std::string_view text) {
  std::vector<double> grid;
  if (text.find_first_not_of(' ') == std::string_view::npos) return grid;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw Error(ErrorKind::InvalidArgument, "grid range must be a:b:step");
    const double a = parse_number(parts[0], "grid start");
    const double b = parse_number(parts[1], "grid end");
    const double step = parse_number(parts[2], "grid step");
    if (!(step > 0.0) || b < a) {
      throw Error(ErrorKind::InvalidArgument, "grid range needs step > 0 and end >= start");
    }
    const double span = (b - a) / step;
    const auto count = static_cast<std::size_t>(std::floor(span + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) grid.push_back(a + static_cast<double>(k) * step);
    return grid;
  }
  for (auto part : split(text, ',')) grid.push_back(parse_number(part, "grid point"));
  return grid;
}

std::pair<int, int> parse_window(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw Error(ErrorKind::InvalidWindow, "window must be first:last");
  const double a = parse_number(parts[0], "window start");
  const double b = parse_number(parts[1], "window end");
  if (a != std::floor(a) || b != std::floor(b)) {
    throw Error(ErrorKind::InvalidWindow, "window bounds must be years");
  }
  return {static_cast<int>(a), static_cast<int>(b)};
}

void write_outputs(const std::filesystem::path& dir, const std::vector<OutputFile>& files) {
  std::filesystem::create_directories(dir);
  const std::string suffix = ".tmp" + std::to_string(::getpid());
  for (const auto& [name, content] : files) {
    const auto final_path = dir / name;
    const auto tmp_path = dir / ("." + name + suffix);
    {
      std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
      out << content;
      out.flush();
      if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write '" + tmp_path.string() + "'");
    }
    std::filesystem::rename(tmp_path, final_path);
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamic poverty indexes from household panels"};
  app.name("dynpov");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  app.add_option("--config", config_path, "JSON file of option values; flags win");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides the simulation config)");
  app.add_option("--out", out_dir, "output directory");

  // estimate
  auto* estimate_cmd = app.add_subcommand("estimate", "fit ModelParams from a panel");
  PanelOptions est;
  est.add_to(estimate_cmd);
  double eta = 2.0;
  std::string window;
  std::string pair_denominator = "n_squared";
  estimate_cmd->add_option("--eta", eta, "years between waves");
  estimate_cmd->add_option("--window", window, "first:last wave years");
  estimate_cmd->add_option("--pair-denominator", pair_denominator, "n_squared or n_times_n_minus_1");

  // indexes / forecast
  std::string model_path;
  std::string grid_text = "0:14:2";
  std::size_t n_bands = 0;
  double alpha = 0.05;
  std::string gini = "lemma4";
  auto* indexes_cmd = app.add_subcommand("indexes", "asymptotic index series with bands");
  indexes_cmd->add_option("--model", model_path, "model JSON from `estimate`");
  indexes_cmd->add_option("--grid", grid_text, "years since the first wave: a:b:step or a,b,...");
  auto* n_opt = indexes_cmd->add_option("--n", n_bands, "population size for the bands");
  indexes_cmd->add_option("--alpha", alpha, "band significance level");
  indexes_cmd->add_option("--gini-numerator", gini, "lemma4 or proposition2_display");

  auto* forecast_cmd = app.add_subcommand("forecast", "index series flagged beyond the fit window");
  std::string years_text;
  forecast_cmd->add_option("--model", model_path, "model JSON from `estimate`");
  forecast_cmd->add_option("--years", years_text, "calendar years: a:b[:step] or a,b,...");
  auto* fn_opt = forecast_cmd->add_option("--n", n_bands, "population size for the bands");
  forecast_cmd->add_option("--alpha", alpha, "band significance level");
  forecast_cmd->add_option("--gini-numerator", gini, "lemma4 or proposition2_display");

  // empirical
  auto* empirical_cmd = app.add_subcommand("empirical", "observed indexes per wave");
  PanelOptions emp;
  emp.add_to(empirical_cmd);
  bool all_records = false;
  empirical_cmd->add_flag("--all-records", all_records,
                          "use every record, not only households seen at every wave");

  // simulate / coverage
  std::string sim_path;
  auto* simulate_cmd = app.add_subcommand("simulate", "simulated cohort indexes");
  simulate_cmd->add_option("--sim-config", sim_path, "simulation config JSON");
  auto* coverage_cmd = app.add_subcommand("coverage", "band coverage experiment");
  coverage_cmd->add_option("--sim-config", sim_path, "simulation config JSON");

  auto fail = [&](std::string_view kind, const std::string& message) {
    err << Json{{"error", kind}, {"message", message}}.dump() << '\n';
    return kFailureExit;
  };

  try {
    // Splice config values in front of the user's arguments so flags win.
    std::vector<std::string> argv = args;
    for (std::size_t k = 0; k < args.size(); ++k) {
      std::string path;
      if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
      if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
      if (path.empty()) continue;
      const Json config = read_json(path);
      if (!config.is_object()) throw Error(ErrorKind::ParseError, "config must be a JSON object");
      std::size_t sub_pos = args.size();
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (std::find(std::begin(kValuedGlobals), std::end(kValuedGlobals), args[i]) !=
            std::end(kValuedGlobals)) {
          ++i;
          continue;
        }
        if (std::find(std::begin(kSubcommands), std::end(kSubcommands), args[i]) !=
            std::end(kSubcommands)) {
          sub_pos = i;
          break;
        }
      }
      if (sub_pos == args.size()) break;
      CLI::App* sub = app.get_subcommand(args[sub_pos]);
      std::vector<std::string> injected;
      for (const auto& [key, value] : config.items()) {
        const std::string flag = "--" + key;
        if (flag == "--config") continue;
        if (!sub->get_option_no_throw(flag) && !app.get_option_no_throw(flag)) {
          throw Error(ErrorKind::InvalidArgument,
                      "config key '" + key + "' is not an option of " + args[sub_pos]);
        }
        if (value.is_boolean()) {
          if (value.get<bool>()) injected.push_back(flag);
          continue;
        }
        injected.push_back(flag);
        injected.push_back(config_value(value, key));
      }
      argv.insert(argv.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1, injected.begin(),
                  injected.end());
      break;
    }

    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
      return fail("InvalidArgument", e.what());
    }

    std::vector<OutputFile> files;

    if (estimate_cmd->parsed()) {
      const auto loaded =
          load_standardized(est, estimate_cmd->count("--base-year") > 0, err);
      const Cohort cohort = build_cohort(loaded.records, loaded.waves, loaded.thresholds);
      EstimateOptions options;
      options.eta = eta;
      if (!window.empty()) options.window = parse_window(window);
      options.pair_denominator = pair_denominator_from_string(pair_denominator);
      const EstimationReport report = estimate(cohort, options);
      Json doc = to_json(report);
      doc["ingestion"] = {{"row_errors", loaded.row_errors},
                          {"households_dropped", cohort.dropped},
                          {"waves", cohort.waves}};
      files.emplace_back("model.json", doc.dump(2) + "\n");
    } else if (indexes_cmd->parsed() || forecast_cmd->parsed()) {
      const bool forecasting = forecast_cmd->parsed();
      if (model_path.empty()) throw Error(ErrorKind::MissingInput, "--model is required");
      check_alpha(alpha);
      const Json model = read_json(model_path);
      const ModelParams params = model_params_from_json(model);
      const IndexOptions opts = index_options(gini);
      const std::size_t n = resolve_n(
          model, (forecasting ? fn_opt : n_opt)->count() ? std::optional(n_bands) : std::nullopt);
      const auto origin = origin_year(model);

      std::vector<double> grid;
      std::optional<int> window_end;
      if (forecasting) {
        if (!origin || !model.contains("window") || !model["window"].is_array() ||
            model["window"].empty()) {
          throw Error(ErrorKind::InvalidArgument, "forecast needs a model with an estimation window");
        }
        window_end = model["window"].back().get<int>();
        std::string spec = years_text;
        if (spec.empty()) throw Error(ErrorKind::InvalidArgument, "--years is required");
        if (std::count(spec.begin(), spec.end(), ':') == 1) {
          const double step = model.contains("eta") ? model["eta"].get<double>() : 1.0;
          spec += ":" + format_number(step);
        }
        for (double year : parse_grid(spec)) {
          if (year < *origin) {
            throw Error(ErrorKind::InvalidWindow, "year " + format_number(year) +
                                                      " precedes the estimation window start " +
                                                      std::to_string(*origin));
          }
          grid.push_back(year - *origin);
        }
      } else {
        grid = parse_grid(grid_text);
      }
      const auto series = index_series(params, grid, n, alpha, opts);
      auto rows = index_rows(series, origin);
      if (forecasting) {
        for (auto& r : rows) r.forecast = r.year && *r.year > *window_end;
      }
      files.emplace_back("indexes.csv", csv(rows, forecasting, false));
    } else if (empirical_cmd->parsed()) {
      const auto loaded =
          load_standardized(emp, empirical_cmd->count("--base-year") > 0, err);
      std::vector<CrossSection> sections;
      if (all_records) {
        for (auto& cs : cross_sections_by_year(loaded.records, loaded.thresholds)) {
          if (std::binary_search(loaded.waves.begin(), loaded.waves.end(), cs.year)) {
            sections.push_back(std::move(cs));
          }
        }
      } else {
        const Cohort cohort = build_cohort(loaded.records, loaded.waves, loaded.thresholds);
        for (std::size_t w = 0; w < cohort.waves.size(); ++w) {
          sections.push_back(cohort.cross_section(w));
        }
      }
      std::vector<IndexRow> rows;
      for (const auto& cs : sections) {
        const EmpiricalIndexes e = compute_indexes(cs, loaded.thresholds);
        for (IndexKind kind : kAllIndexes) {
          IndexRow r;
          r.kind = kind;
          r.t = static_cast<double>(cs.year - loaded.waves.front());
          r.value = index_of(e, kind);
          r.n = cs.observations.size();
          r.year = cs.year;
          r.status = std::string(kind == IndexKind::H ? "ok" : to_string(e.status));
          rows.push_back(r);
        }
      }
      files.emplace_back("observed.csv", csv(rows, false, true));
    } else if (simulate_cmd->parsed() || coverage_cmd->parsed()) {
      if (sim_path.empty()) throw Error(ErrorKind::MissingInput, "--sim-config is required");
      SimConfig config = sim_config_from_json(read_json(sim_path));
      if (seed_opt->count()) config.seed = seed;
      if (simulate_cmd->parsed()) {
        const CohortRun run = run_cohort(config);
        std::ostringstream ss;
        write_cohort_csv(ss, run);
        files.emplace_back("cohort.csv", ss.str());
      } else {
        const CoverageReport report = coverage_experiment(config);
        std::ostringstream ss;
        write_coverage_csv(ss, report);
        files.emplace_back("coverage.csv", ss.str());
        files.emplace_back("coverage.json", to_json(report).dump(2) + "\n");
      }
    }

    write_outputs(out_dir, files);
    for (const auto& f : files) out << (std::filesystem::path(out_dir) / f.first).string() << '\n';
    return 0;
  } catch (const Error& e) {
    return fail(to_string(e.kind()), e.what());
  } catch (const Json::exception& e) {
    return fail("ParseError", e.what());
  } catch (const std::exception& e) {
    return fail("InvalidArgument", e.what());
  }
}

}  // namespace dynpov::cli
