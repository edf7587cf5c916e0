// Poisson-process (shifted exponential) model of dark-count intervals: density,
// theoretical SRA curve, rate estimation and R^2 diagnostics.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "sra/binning.hpp"
#include "sra/error.hpp"
#include "sra/ranked.hpp"

namespace sra {

/// Rate lambda (1/s) and dead time t_d (s). Density lambda exp(-lambda (x - t_d)).
class PoissonModel {
 public:
  explicit PoissonModel(double lambda, double dead_time = 0.0)
      : lambda_(lambda), dead_time_(dead_time) {
    if (!std::isfinite(lambda) || lambda <= 0.0) {
      throw Error(Errc::InvalidArgument, "rate must be finite and positive");
    }
    if (!std::isfinite(dead_time) || dead_time < 0.0) {
      throw Error(Errc::InvalidArgument, "dead time must be finite and non-negative");
    }
  }

  [[nodiscard]] double lambda() const noexcept { return lambda_; }
  [[nodiscard]] double dead_time() const noexcept { return dead_time_; }

 private:
  double lambda_;
  double dead_time_;
};

enum class FitMethod { Mle, SraLeastSquares };

constexpr std::string_view fit_method_name(FitMethod m) noexcept {
  return m == FitMethod::Mle ? "mle" : "sra-ls";
}

struct PoissonFit {
  PoissonModel model{1.0};
  FitMethod method = FitMethod::Mle;
  // NaN when the SRA has fewer than three points or zero variance.
  double r_squared = std::numeric_limits<double>::quiet_NaN();
  double residual_fraction = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_used = 0;
};

inline double model_density(const PoissonModel& model, double x) noexcept {
  if (x < model.dead_time()) return 0.0;
  return model.lambda() * std::exp(-model.lambda() * (x - model.dead_time()));
}

/// s_n = t_d + ln(N / (n - 1)) / lambda for ranks 2..N.
inline double model_sra(const PoissonModel& model, std::size_t n_total, std::size_t rank) {
  if (rank == 1) throw Error(Errc::DivergentRank, "model SRA diverges at rank 1");
  if (rank == 0 || rank > n_total) {
    throw Error(Errc::RankOutOfRange,
                "rank " + std::to_string(rank) + " outside [2, " + std::to_string(n_total) + "]");
  }
  const double ratio = static_cast<double>(n_total) / static_cast<double>(rank - 1);
  return model.dead_time() + std::log(ratio) / model.lambda();
}

namespace detail {

inline double r_squared(std::span<const double> observed, std::span<const double> predicted) {
  double mean = 0.0;
  for (double v : observed) mean += v;
  mean /= static_cast<double>(observed.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double r = observed[i] - predicted[i];
    const double d = observed[i] - mean;
    ss_res += r * r;
    ss_tot += d * d;
  }
  if (!(ss_tot > 0.0)) throw Error(Errc::DegenerateVariance, "observed values have zero variance");
  return 1.0 - ss_res / ss_tot;
}

}  // namespace detail

/// R^2 of the SRA against the model curve over ranks 2..N.
inline double r2_sra(const RankedSequence& sra, const PoissonModel& model) {
  const std::size_t n_total = sra.size();
  if (n_total < 3) throw Error(Errc::TooFewPoints, "R^2 on the SRA needs N >= 3");
  const auto observed = sra.values().subspan(1);
  std::vector<double> predicted(observed.size());
  for (std::size_t rank = 2; rank <= n_total; ++rank) {
    predicted[rank - 2] = model_sra(model, n_total, rank);
  }
  return detail::r_squared(observed, predicted);
}

/// R^2 of histogram densities against the model density at bin centers.
inline double r2_hist(const Histogram& hist, const PoissonModel& model) {
  if (hist.bin_count() < 3) throw Error(Errc::TooFewPoints, "R^2 on a histogram needs N_h >= 3");
  std::vector<double> predicted(hist.bin_count());
  for (std::size_t m = 0; m < predicted.size(); ++m) {
    predicted[m] = model_density(model, hist.center(m));
  }
  return detail::r_squared(hist.densities, predicted);
}

namespace detail {

inline PoissonFit finish_fit(const RankedSequence& sra, PoissonModel model, FitMethod method) {
  PoissonFit fit{model, method};
  fit.n_used = sra.size();
  if (sra.size() >= 3) {
    try {
      fit.r_squared = r2_sra(sra, model);
      fit.residual_fraction = 1.0 - fit.r_squared;
    } catch (const Error& e) {
      if (e.code() != Errc::DegenerateVariance) throw;
    }
  }
  return fit;
}

}  // namespace detail

/// Exponential maximum likelihood: lambda = 1 / (mean - t_d).
inline PoissonFit fit_mle(const IntervalSample& sample, double dead_time = 0.0) {
  if (sample.empty()) throw Error(Errc::EmptyInput, "cannot fit an empty sample");
  const double excess = sample.mean() - dead_time;
  if (!(excess > 0.0)) {
    throw Error(Errc::InconsistentDeadTime, "sample mean does not exceed the dead time");
  }
  return detail::finish_fit(build_sra(sample), PoissonModel(1.0 / excess, dead_time),
                            FitMethod::Mle);
}

/// Least squares of the SRA against the model curve in c = 1/lambda:
/// with a_n = ln(N / (n - 1)) and t_n = s_n - t_d, c = sum(a t) / sum(a^2).
inline PoissonFit fit_sra_least_squares(const RankedSequence& sra, double dead_time = 0.0) {
  const std::size_t n_total = sra.size();
  if (n_total < 3) throw Error(Errc::TooFewPoints, "SRA least squares needs N >= 3");
  if (!std::isfinite(dead_time) || dead_time < 0.0) {
    throw Error(Errc::InvalidArgument, "dead time must be finite and non-negative");
  }
  const auto s = sra.values();
  double saa = 0.0;
  double sat = 0.0;
  for (std::size_t rank = 2; rank <= n_total; ++rank) {
    const double a = std::log(static_cast<double>(n_total) / static_cast<double>(rank - 1));
    saa += a * a;
    sat += a * (s[rank - 1] - dead_time);
  }
  if (!(sat > 0.0)) throw Error(Errc::NonPositiveScale, "fitted scale is not positive");
  return detail::finish_fit(sra, PoissonModel(saa / sat, dead_time), FitMethod::SraLeastSquares);
}

/// Noiseless model SRA of length N; rank 1 is taken as the rank-2 value.
inline RankedSequence model_sra_sequence(const PoissonModel& model, std::size_t n_total) {
  if (n_total < 2) throw Error(Errc::TooFewPoints, "model SRA sequence needs N >= 2");
  std::vector<double> values(n_total);
  for (std::size_t rank = 2; rank <= n_total; ++rank) {
    values[rank - 1] = model_sra(model, n_total, rank);
  }
  values[0] = values[1];
  return RankedSequence::from_sorted(std::move(values));
}

}  // namespace sra
