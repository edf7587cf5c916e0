// Report assembly and CSV/JSON serialization for the sra-kit tool.
#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sra/sra.hpp"

namespace sra::report {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "sra-kit/1";

/// Shortest decimal that reads back to the same double.
inline std::string format_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json number_or_null(const std::optional<double>& v) {
  return v ? number_or_null(*v) : json(nullptr);
}

class StageTimer {
 public:
  template <class F>
  decltype(auto) time(const std::string& stage, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<std::invoke_result_t<F>>) {
      body();
      record(stage, start);
    } else {
      auto result = body();
      record(stage, start);
      return result;
    }
  }

  [[nodiscard]] json to_json() const {
    json out = json::object();
    for (const auto& [stage, ms] : stages_) out[stage] = ms;
    return out;
  }

 private:
  void record(const std::string& stage, std::chrono::steady_clock::time_point start) {
    const std::chrono::duration<double, std::milli> elapsed =
        std::chrono::steady_clock::now() - start;
    stages_.emplace_back(stage, elapsed.count());
  }

  std::vector<std::pair<std::string, double>> stages_;
};

// ---------------------------------------------------------------------------
// Fit summary

struct FitOptions {
  FitMethod method = FitMethod::SraLeastSquares;
  bool normalize_mean = true;
  double dead_time = 0.0;  // seconds
  BinningRule binning = BinningRule::mann_wald();
  /// Rate taken from this sample instead of estimated on the fitted one.
  std::optional<IntervalSample> lambda_source;
};

struct FitSummary {
  PoissonFit fit;
  double scale = 1.0;  // divisor applied to the data before fitting
  double rate_per_second = 0.0;
  std::size_t hist_bins = 0;
  double r2_hist = std::numeric_limits<double>::quiet_NaN();
  double residual_ratio = std::numeric_limits<double>::quiet_NaN();

  [[nodiscard]] double residual_fraction_hist() const { return 1.0 - r2_hist; }
};

inline PoissonFit fit_with(const IntervalSample& sample, FitMethod method, double dead_time) {
  return method == FitMethod::Mle ? fit_mle(sample, dead_time)
                                  : fit_sra_least_squares(build_sra(sample), dead_time);
}

/// Fits the model on `sample` (optionally mean-normalized, with the dead time
/// scaled alongside) and scores it on both the SRA and the histogram.
inline FitSummary summarize_fit(const IntervalSample& sample, const FitOptions& options) {
  FitSummary out;
  out.scale = options.normalize_mean ? sample.mean() : 1.0;
  const IntervalSample data = options.normalize_mean ? normalize_to_mean(sample) : sample;
  const double dead_time = options.dead_time / out.scale;

  if (options.lambda_source) {
    const auto& global = *options.lambda_source;
    const double global_scale = options.normalize_mean ? global.mean() : 1.0;
    const IntervalSample global_data = options.normalize_mean ? normalize_to_mean(global) : global;
    const PoissonFit global_fit = fit_with(global_data, options.method, options.dead_time / global_scale);
    // Rate in the coordinates of `data`.
    const double lambda = global_fit.model.lambda() / global_scale * out.scale;
    const auto sra = build_sra(data);
    out.fit = PoissonFit{PoissonModel(lambda, dead_time), options.method};
    out.fit.n_used = data.size();
    out.fit.r_squared = r2_sra(sra, out.fit.model);
    out.fit.residual_fraction = 1.0 - out.fit.r_squared;
  } else {
    out.fit = fit_with(data, options.method, dead_time);
  }
  out.rate_per_second = out.fit.model.lambda() / out.scale;

  const Histogram hist = build_histogram(data, options.binning);
  out.hist_bins = hist.bin_count();
  out.r2_hist = r2_hist(hist, out.fit.model);
  out.residual_ratio = (1.0 - out.r2_hist) / out.fit.residual_fraction;
  return out;
}

inline json fit_to_json(const FitSummary& s) {
  json j;
  j["method"] = std::string(fit_method_name(s.fit.method));
  j["lambda"] = s.fit.model.lambda();
  j["dead_time"] = s.fit.model.dead_time();
  j["scale"] = s.scale;
  j["rate_per_second"] = s.rate_per_second;
  j["n_used"] = s.fit.n_used;
  j["r2_sra"] = number_or_null(s.fit.r_squared);
  j["residual_fraction_sra"] = number_or_null(s.fit.residual_fraction);
  j["hist_bins"] = s.hist_bins;
  j["r2_hist"] = number_or_null(s.r2_hist);
  j["residual_fraction_hist"] = number_or_null(s.residual_fraction_hist());
  j["residual_ratio"] = number_or_null(s.residual_ratio);
  return j;
}

// ---------------------------------------------------------------------------
// Stability curve

inline void write_stability_csv(const StabilityCurve& curve, std::ostream& out) {
  out << "N,eps_sra,eps_hist\n";
  for (std::size_t i = 0; i < curve.n_grid.size(); ++i) {
    out << curve.n_grid[i] << ',' << format_number(curve.eps_sra[i]) << ','
        << format_number(curve.eps_hist[i]) << '\n';
  }
}

inline json curve_to_json(const StabilityCurve& curve) {
  json j;
  j["n"] = curve.n_grid;
  j["eps_sra"] = curve.eps_sra;
  j["eps_hist"] = curve.eps_hist;
  j["q"] = curve.q_count;
  j["binning"] = curve.binning.name();
  return j;
}

/// Values at N = 1000 and their ratio; absent when 1000 is not on the grid.
struct HeadlineEpsilon {
  std::optional<double> eps_sra;
  std::optional<double> eps_hist;
  std::optional<double> ratio;
};

inline HeadlineEpsilon headline_epsilon(const StabilityCurve& curve, std::size_t n = 1000) {
  HeadlineEpsilon h;
  if (const auto i = curve.index_of(n)) {
    h.eps_sra = curve.eps_sra[*i];
    h.eps_hist = curve.eps_hist[*i];
    h.ratio = *h.eps_hist / *h.eps_sra;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Histogram export

/// Histogram rows with the normalized coordinate z = N (x - x_min) / (x_max - x_min).
inline void write_histogram_csv(const Histogram& hist, std::ostream& out) {
  const double lo = hist.edges.front();
  const double range = hist.edges.back() - lo;
  const double n = static_cast<double>(hist.n_source);
  auto to_z = [&](double x) { return n * (x - lo) / range; };
  out << "bin,left,right,z_left,z_right,count,density,density_z\n";
  for (std::size_t m = 0; m < hist.bin_count(); ++m) {
    const double zl = to_z(hist.edges[m]);
    const double zr = m + 1 == hist.bin_count() ? n : to_z(hist.edges[m + 1]);
    const double density_z = static_cast<double>(hist.counts[m]) / (n * (zr - zl));
    out << m << ',' << format_number(hist.edges[m]) << ',' << format_number(hist.edges[m + 1])
        << ',' << format_number(zl) << ',' << format_number(zr) << ',' << hist.counts[m] << ','
        << format_number(hist.densities[m]) << ',' << format_number(density_z) << '\n';
  }
}

// ---------------------------------------------------------------------------
// File bookkeeping

/// Tracks files written by a command; removes them unless committed.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;

  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : written_) std::filesystem::remove(p, ec);
  }

  template <class Writer>
  std::filesystem::path write(const std::string& name, Writer&& writer) {
    std::filesystem::create_directories(dir_);
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot open '" + path.string() + "' for writing");
    written_.push_back(path);
    writer(out);
    out.flush();
    if (!out) throw Error(Errc::IoError, "write failure on '" + path.string() + "'");
    return path;
  }

  void commit() noexcept { committed_ = true; }
  [[nodiscard]] const std::vector<std::filesystem::path>& files() const noexcept { return written_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> written_;
  bool committed_ = false;
};

inline void write_json(const json& j, std::ostream& out) { out << j.dump(2) << '\n'; }

}  // namespace sra::report
