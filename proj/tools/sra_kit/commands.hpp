// sra-kit command line: simulate | stability | fit | report.
//
// Exit codes: 0 success, 1 analysis-level failure, 2 usage error.
#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "report.hpp"
#include "sra/sra.hpp"

namespace sra::cli {

using report::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitAnalysis = 1;
inline constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// "start:stop:step" or a comma-separated list of positive integers.
inline std::vector<std::size_t> parse_grid(const std::string& text) {
  auto to_size = [&](const std::string& part) -> std::size_t {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != part.size() || v <= 0) {
      throw UsageError("invalid grid value '" + part + "'");
    }
    return static_cast<std::size_t>(v);
  };
  std::vector<std::size_t> grid;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw UsageError("grid range must be start:stop:step");
    const auto start = to_size(parts[0]);
    const auto stop = to_size(parts[1]);
    const auto step = to_size(parts[2]);
    for (std::size_t n = start; n <= stop; n += step) grid.push_back(n);
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) grid.push_back(to_size(p));
  }
  if (grid.empty()) throw UsageError("empty grid '" + text + "'");
  return grid;
}

template <class T, class F>
T parse_flag(const std::string& flag, const std::string& text, F&& parser) {
  try {
    return parser(text);
  } catch (const Error& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

struct InputFlags {
  std::string input;
  std::string format = "intervals";
  std::string unit = "s";

  void add_to(CLI::App& app, bool required) {
    auto* opt = app.add_option("--input", input, "Interval or timestamp record");
    if (required) opt->required();
    app.add_option("--format", format, "Record kind")
        ->check(CLI::IsMember({"intervals", "timestamps"}))
        ->capture_default_str();
    app.add_option("--unit", unit, "Unit of the record values")
        ->check(CLI::IsMember({"s", "ms", "us", "ns"}))
        ->capture_default_str();
  }

  [[nodiscard]] IntervalSample load() const {
    return read_record(input, RecordFormat{parse_record_kind(format), parse_unit(unit)});
  }
};

struct SimFlags {
  DetectorConfig config = default_detector_config();

  void add_to(CLI::App& app) {
    app.add_option("--rate", config.dark_rate, "Dark count rate (1/s)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--dead-time", config.dead_time, "Dead time (s)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app.add_option("--n", config.n_events, "Number of intervals")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--efficiency", config.efficiency, "Detection efficiency (metadata)")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
  }
};

inline json config_json(const DetectorConfig& c) {
  json j;
  j["dark_rate"] = c.dark_rate;
  j["dead_time"] = c.dead_time;
  j["efficiency"] = c.efficiency;
  j["n_events"] = c.n_events;
  j["seed"] = c.seed;
  return j;
}

struct StabilityFlags {
  std::size_t q = 100;
  std::string grid = "20:1000:20";
  std::string binning = "mann-wald";
  std::string edges = "per-subsample";
  std::string subsampling = "contiguous";
  unsigned threads = 0;

  void add_to(CLI::App& app) {
    app.add_option("--q", q, "Number of subsamples Q")->check(CLI::Range(2, 1 << 30))->capture_default_str();
    app.add_option("--grid", grid, "Subsample lengths, start:stop:step or a,b,c")->capture_default_str();
    app.add_option("--binning", binning, "sturges | mann-wald | max-tenth | <bins>")->capture_default_str();
    app.add_option("--edges", edges, "Histogram edge alignment across subsamples")
        ->check(CLI::IsMember({"per-subsample", "shared"}))
        ->capture_default_str();
    app.add_option("--subsampling", subsampling, "Block selection")
        ->check(CLI::IsMember({"contiguous", "random"}))
        ->capture_default_str();
    app.add_option("--threads", threads, "Worker threads over grid points (0 = all cores)")
        ->capture_default_str();
  }

  [[nodiscard]] StabilityOptions options(std::uint64_t seed) const {
    StabilityOptions o;
    o.edges = edges == "shared" ? EdgeMode::Shared : EdgeMode::PerSubsample;
    o.subsampling = subsampling == "random" ? Subsampling::RandomBlocks : Subsampling::Contiguous;
    o.seed = seed;
    o.threads = threads;
    return o;
  }

  [[nodiscard]] BinningRule rule() const {
    return parse_flag<BinningRule>("--binning", binning, BinningRule::parse);
  }

  [[nodiscard]] json to_json() const {
    json j;
    j["q"] = q;
    j["grid"] = grid;
    j["binning"] = binning;
    j["edges"] = edges;
    j["subsampling"] = subsampling;
    return j;
  }
};

struct FitFlags {
  std::string method = "sra-ls";
  double dead_time = 0.0;
  std::string normalize = "mean";
  std::string binning = "mann-wald";

  void add_to(CLI::App& app, const std::string& binning_flag, bool with_dead_time) {
    app.add_option("--method", method, "Rate estimator")
        ->check(CLI::IsMember({"mle", "sra-ls"}))
        ->capture_default_str();
    if (with_dead_time) {
      app.add_option("--dead-time", dead_time, "Dead time used by the model (s)")
          ->check(CLI::NonNegativeNumber)
          ->capture_default_str();
    }
    app.add_option("--normalize", normalize, "Scale the data before fitting")
        ->check(CLI::IsMember({"mean", "none"}))
        ->capture_default_str();
    app.add_option(binning_flag, binning, "Histogram rule for the density R^2")->capture_default_str();
  }

  [[nodiscard]] report::FitOptions options() const {
    report::FitOptions o;
    o.method = method == "mle" ? FitMethod::Mle : FitMethod::SraLeastSquares;
    o.normalize_mean = normalize == "mean";
    o.dead_time = dead_time;
    o.binning = parse_flag<BinningRule>("binning", binning, BinningRule::parse);
    return o;
  }

  [[nodiscard]] json to_json() const {
    json j;
    j["method"] = method;
    j["dead_time"] = dead_time;
    j["normalize"] = normalize;
    j["binning"] = binning;
    return j;
  }
};

// ---------------------------------------------------------------------------

inline int cmd_simulate(const SimFlags& sim, TimeUnit unit, const std::string& out_path,
                        std::ostream& out) {
  const IntervalSample sample = simulate_intervals(sim.config);
  std::filesystem::path path(out_path);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_record(sample, path.string(), unit);
  out << "wrote " << sample.size() << " intervals to " << path.string() << '\n';
  return kExitOk;
}

/// Grid points with q * N within the record length.
inline std::vector<std::size_t> feasible_grid(const std::vector<std::size_t>& grid, std::size_t q,
                                              std::size_t length) {
  std::vector<std::size_t> out;
  for (auto n : grid) {
    if (n <= length / q) out.push_back(n);
  }
  if (out.empty()) {
    const auto n_min = *std::min_element(grid.begin(), grid.end());
    throw Error(Errc::InsufficientData, "record has " + std::to_string(length) +
                                            " intervals; at least " + std::to_string(q * n_min) +
                                            " are required");
  }
  return out;
}

inline int cmd_stability(const InputFlags& input, const StabilityFlags& flags,
                         std::uint64_t seed, const std::string& out_dir, std::ostream& out) {
  const auto grid = parse_grid(flags.grid);
  const auto rule = flags.rule();
  report::StageTimer timer;
  const auto sample = timer.time("load", [&] { return input.load(); });
  const auto feasible = feasible_grid(grid, flags.q, sample.size());
  const auto curve = timer.time("stability", [&] {
    return stability_curve(sample, flags.q, feasible, rule, flags.options(seed));
  });
  const auto head = report::headline_epsilon(curve);

  json j;
  j["schema"] = report::kSchema;
  j["config"] = flags.to_json();
  j["config"]["input"] = input.input;
  j["config"]["seed"] = seed;
  j["eps_curve"] = report::curve_to_json(curve);
  j["eps_sra_at_1000"] = report::number_or_null(head.eps_sra);
  j["eps_hist_at_1000"] = report::number_or_null(head.eps_hist);
  j["eps_ratio"] = report::number_or_null(head.ratio);
  j["timings_ms"] = timer.to_json();

  report::OutputSet files(out_dir);
  files.write("stability.csv", [&](std::ostream& os) { report::write_stability_csv(curve, os); });
  files.write("stability.json", [&](std::ostream& os) { report::write_json(j, os); });
  files.commit();
  out << "wrote " << curve.n_grid.size() << " grid points to " << out_dir << '\n';
  return kExitOk;
}

inline int cmd_fit(const InputFlags& input, const FitFlags& flags, std::size_t n_fit,
                   const std::string& lambda_from, const std::string& out_dir,
                   std::ostream& out) {
  auto options = flags.options();
  const auto full = input.load();
  if (full.empty()) throw Error(Errc::EmptyInput, "record is empty");
  const auto sample = n_fit == 0 ? full : full.head(n_fit);
  if (lambda_from == "global") options.lambda_source = full;
  const auto summary = report::summarize_fit(sample, options);

  json j;
  j["schema"] = report::kSchema;
  j["config"] = flags.to_json();
  j["config"]["input"] = input.input;
  j["config"]["n"] = sample.size();
  j["config"]["lambda_from"] = lambda_from;
  j["fit"] = report::fit_to_json(summary);
  if (!out_dir.empty()) {
    report::OutputSet files(out_dir);
    files.write("fit.json", [&](std::ostream& os) { report::write_json(j, os); });
    files.commit();
  }
  report::write_json(j, out);
  return kExitOk;
}

struct ReportFlags {
  bool simulate = false;
  std::size_t fit_n = 1000;
  std::size_t hist_n = 1000;
  std::optional<double> fit_dead_time;
};

inline int cmd_report(const InputFlags& input, const SimFlags& sim, const StabilityFlags& stab,
                      const FitFlags& fit_flags, const ReportFlags& flags, std::uint64_t seed,
                      const std::string& out_dir, std::ostream& out) {
  if (flags.simulate == !input.input.empty()) {
    throw UsageError("report needs exactly one of --input or --simulate");
  }
  const auto grid = parse_grid(stab.grid);
  const auto rule = stab.rule();
  auto fit_options = fit_flags.options();
  fit_options.dead_time =
      flags.fit_dead_time.value_or(flags.simulate ? sim.config.dead_time : 0.0);

  report::StageTimer timer;
  DetectorConfig config = sim.config;
  config.seed = seed;
  const IntervalSample sample = timer.time("load", [&] {
    return flags.simulate ? simulate_intervals(config) : input.load();
  });

  const auto feasible = feasible_grid(grid, stab.q, sample.size());
  const auto curve = timer.time("stability", [&] {
    return stability_curve(sample, stab.q, feasible, rule, stab.options(seed));
  });
  const auto head = report::headline_epsilon(curve);

  const auto fit_sample = sample.head(flags.fit_n);
  const auto fit = timer.time("fit", [&] { return report::summarize_fit(fit_sample, fit_options); });

  const auto hist_sample = sample.head(flags.hist_n);
  const auto hist_sturges = timer.time("histograms", [&] {
    return build_histogram(hist_sample, BinningRule::sturges());
  });
  const auto hist_mw = timer.time("histograms", [&] {
    return build_histogram(hist_sample, BinningRule::mann_wald());
  });

  json j;
  j["schema"] = report::kSchema;
  json cfg;
  cfg["input"] = flags.simulate ? json(nullptr) : json(input.input);
  cfg["simulate"] = flags.simulate ? config_json(config) : json(nullptr);
  cfg["seed"] = seed;
  cfg["n_points"] = sample.size();
  cfg["stability"] = stab.to_json();
  cfg["fit"] = fit_flags.to_json();
  cfg["fit"]["dead_time"] = fit_options.dead_time;
  cfg["fit"]["n"] = fit_sample.size();
  j["config"] = cfg;
  j["eps_curve"] = report::curve_to_json(curve);
  j["eps_sra_at_1000"] = report::number_or_null(head.eps_sra);
  j["eps_hist_at_1000"] = report::number_or_null(head.eps_hist);
  j["eps_ratio"] = report::number_or_null(head.ratio);
  j["fit_sra"] = report::fit_to_json(fit);
  j["fit_hist_r2"] = report::number_or_null(fit.r2_hist);
  j["residual_ratio"] = report::number_or_null(fit.residual_ratio);
  json hists = json::array();
  hists.push_back({{"rule", "sturges"}, {"n", hist_sample.size()}, {"bins", hist_sturges.bin_count()},
                   {"file", "hist_sturges.csv"}});
  hists.push_back({{"rule", "mann-wald"}, {"n", hist_sample.size()}, {"bins", hist_mw.bin_count()},
                   {"file", "hist_mann_wald.csv"}});
  j["histograms"] = hists;
  j["timings_ms"] = timer.to_json();

  report::OutputSet files(out_dir);
  files.write("stability.csv", [&](std::ostream& os) { report::write_stability_csv(curve, os); });
  files.write("hist_sturges.csv",
              [&](std::ostream& os) { report::write_histogram_csv(hist_sturges, os); });
  files.write("hist_mann_wald.csv",
              [&](std::ostream& os) { report::write_histogram_csv(hist_mw, os); });
  files.write("report.json", [&](std::ostream& os) { report::write_json(j, os); });
  files.commit();

  // Dominance at N = 1000, or at the largest grid point when 1000 is absent.
  const std::size_t last = curve.index_of(1000).value_or(curve.n_grid.size() - 1);
  const bool dominant = curve.eps_sra[last] < curve.eps_hist[last];
  out << "N=" << curve.n_grid[last] << " eps_sra=" << report::format_number(curve.eps_sra[last])
      << " eps_hist=" << report::format_number(curve.eps_hist[last])
      << " residual_ratio=" << report::format_number(fit.residual_ratio) << '\n';
  return dominant ? kExitOk : kExitAnalysis;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Dark-count characterization with ranked amplitudes and histograms", "sra-kit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "sra-kit 1.0.0");

  std::uint64_t seed = 0;

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic dark-count interval record");
  SimFlags sim_flags;
  sim_flags.add_to(*sim_cmd);
  std::string sim_out;
  std::string sim_unit = "s";
  std::string sim_out_dir = ".";
  sim_cmd->add_option("--seed", seed, "Generator seed")->capture_default_str();
  sim_cmd->add_option("--out", sim_out, "Output file (default <out-dir>/intervals.txt)");
  sim_cmd->add_option("--out-dir", sim_out_dir, "Output directory")->capture_default_str();
  sim_cmd->add_option("--unit", sim_unit, "Unit written to the file")
      ->check(CLI::IsMember({"s", "ms", "us", "ns"}))
      ->capture_default_str();

  // stability
  auto* stab_cmd = app.add_subcommand("stability", "Deviation factor curves for SRA and histograms");
  InputFlags stab_input;
  stab_input.add_to(*stab_cmd, true);
  StabilityFlags stab_flags;
  stab_flags.add_to(*stab_cmd);
  stab_cmd->add_option("--seed", seed, "Seed for random block selection")->capture_default_str();
  std::string stab_out_dir = ".";
  stab_cmd->add_option("--out-dir", stab_out_dir, "Output directory")->capture_default_str();

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit the Poisson model and score SRA and histogram");
  InputFlags fit_input;
  fit_input.add_to(*fit_cmd, true);
  FitFlags fit_flags;
  fit_flags.add_to(*fit_cmd, "--binning", true);
  std::size_t fit_n = 0;
  std::string lambda_from = "subsample";
  std::string fit_out_dir;
  fit_cmd->add_option("--n", fit_n, "Fit the first n intervals (0 = all)")->capture_default_str();
  fit_cmd->add_option("--lambda-from", lambda_from, "Estimate the rate on the fitted subsample or the whole record")
      ->check(CLI::IsMember({"subsample", "global"}))
      ->capture_default_str();
  fit_cmd->add_option("--seed", seed, "Unused; accepted for symmetry")->capture_default_str();
  fit_cmd->add_option("--out-dir", fit_out_dir, "Also write fit.json here");

  // report
  auto* rep_cmd = app.add_subcommand("report", "Full SRA vs histogram comparison");
  InputFlags rep_input;
  rep_input.add_to(*rep_cmd, false);
  SimFlags rep_sim;
  ReportFlags rep_flags;
  rep_cmd->add_flag("--simulate", rep_flags.simulate, "Analyze a simulated record instead of --input");
  rep_cmd->add_option("--rate", rep_sim.config.dark_rate, "Simulated dark count rate (1/s)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  rep_cmd->add_option("--sim-dead-time", rep_sim.config.dead_time, "Simulated dead time (s)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  rep_cmd->add_option("--n", rep_sim.config.n_events, "Simulated record length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  StabilityFlags rep_stab;
  rep_stab.add_to(*rep_cmd);
  FitFlags rep_fit;
  rep_fit.add_to(*rep_cmd, "--fit-binning", false);
  double rep_dead_time = -1.0;
  rep_cmd->add_option("--dead-time", rep_dead_time,
                      "Model dead time (s); defaults to the simulated dead time, else 0")
      ->check(CLI::NonNegativeNumber);
  rep_cmd->add_option("--fit-n", rep_flags.fit_n, "Subsample length for the fit comparison")
      ->check(CLI::Range(3, 1 << 30))
      ->capture_default_str();
  rep_cmd->add_option("--hist-n", rep_flags.hist_n, "Subsample length for the exported histograms")
      ->check(CLI::Range(2, 1 << 30))
      ->capture_default_str();
  rep_cmd->add_option("--seed", seed, "Simulation and block selection seed")->capture_default_str();
  std::string rep_out_dir = "report";
  rep_cmd->add_option("--out-dir", rep_out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*sim_cmd) {
      if (sim_out.empty()) sim_out = (std::filesystem::path(sim_out_dir) / "intervals.txt").string();
      sim_flags.config.seed = seed;
      return cmd_simulate(sim_flags, parse_unit(sim_unit), sim_out, out);
    }
    if (*stab_cmd) return cmd_stability(stab_input, stab_flags, seed, stab_out_dir, out);
    if (*fit_cmd) return cmd_fit(fit_input, fit_flags, fit_n, lambda_from, fit_out_dir, out);
    if (*rep_cmd) {
      if (rep_dead_time >= 0.0) rep_flags.fit_dead_time = rep_dead_time;
      return cmd_report(rep_input, rep_sim, rep_stab, rep_fit, rep_flags, seed, rep_out_dir, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitAnalysis;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitAnalysis;
  }
  return kExitUsage;
}

}  // namespace sra::cli
