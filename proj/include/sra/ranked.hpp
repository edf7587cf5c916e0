// Sequence of ranged amplitudes (SRA): interval samples ranked in descending
// order, and the rank-based distribution function F(s_n, N) = (N + 1 - n) / N.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sra/error.hpp"

namespace sra {

/// Raw record of inter-count intervals in seconds, in acquisition order.
///
/// Every value is finite and strictly positive. An empty sample is
/// representable (e.g. an empty file), but the analysis operations reject it.
class IntervalSample {
 public:
  IntervalSample() = default;

  explicit IntervalSample(std::vector<double> values, std::string source = {},
                          std::string unit = "s")
      : values_(std::move(values)), unit_(std::move(unit)), source_(std::move(source)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double v = values_[i];
      if (!std::isfinite(v) || v <= 0.0) {
        throw Error(Errc::InvalidInterval,
                    "interval at index " + std::to_string(i) + " is not finite and positive", i);
      }
    }
  }

  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
  [[nodiscard]] const std::string& unit() const noexcept { return unit_; }
  [[nodiscard]] const std::string& source() const noexcept { return source_; }

  [[nodiscard]] double mean() const {
    if (values_.empty()) throw Error(Errc::EmptyInput, "mean of an empty sample");
    return std::accumulate(values_.begin(), values_.end(), 0.0) /
           static_cast<double>(values_.size());
  }

  /// First `n` values as a new sample with the same provenance.
  [[nodiscard]] IntervalSample head(std::size_t n) const {
    n = std::min(n, values_.size());
    return IntervalSample(std::vector<double>(values_.begin(), values_.begin() + n), source_,
                          unit_);
  }

 private:
  std::vector<double> values_;
  std::string unit_ = "s";
  std::string source_;
};

/// Values sorted non-increasing; position n (1-based) is the rank.
class RankedSequence {
 public:
  RankedSequence() = default;

  /// Wraps values that are already sorted non-increasing.
  static RankedSequence from_sorted(std::vector<double> values) {
    if (values.empty()) throw Error(Errc::EmptyInput, "ranked sequence needs at least one value");
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      if (!(values[i] >= values[i + 1])) {
        throw Error(Errc::InvalidArgument, "values are not sorted non-increasing", i + 1);
      }
    }
    RankedSequence out;
    out.values_ = std::move(values);
    return out;
  }

  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] bool empty() const noexcept { return values_.empty(); }

  /// s_n for the 1-based rank n.
  [[nodiscard]] double at_rank(std::size_t rank) const {
    if (rank == 0 || rank > values_.size()) {
      throw Error(Errc::RankOutOfRange, "rank " + std::to_string(rank) + " outside [1, N]");
    }
    return values_[rank - 1];
  }

  friend bool operator==(const RankedSequence&, const RankedSequence&) = default;

 private:
  std::vector<double> values_;
};

/// Stable descending sort of a sequence of values.
inline RankedSequence rank_values(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::EmptyInput, "cannot rank an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::stable_sort(sorted.begin(), sorted.end(), std::greater<>{});
  return RankedSequence::from_sorted(std::move(sorted));
}

inline RankedSequence build_sra(const IntervalSample& sample) {
  return rank_values(sample.values());
}

/// One point of the rank-based distribution function.
struct EcdfPoint {
  double value = 0.0;
  std::size_t rank = 0;
  std::size_t n_total = 0;
  double cdf = 0.0;

  /// cdf as the unreduced fraction (N + 1 - n) / N.
  [[nodiscard]] std::pair<std::size_t, std::size_t> cdf_fraction() const noexcept {
    return {n_total + 1 - rank, n_total};
  }
};

inline std::vector<EcdfPoint> ecdf(const RankedSequence& sra) {
  if (sra.empty()) throw Error(Errc::EmptyInput, "ecdf of an empty sequence");
  const std::size_t n_total = sra.size();
  const auto values = sra.values();
  std::vector<EcdfPoint> points;
  points.reserve(n_total);
  for (std::size_t rank = 1; rank <= n_total; ++rank) {
    // Integer numerator, single rounding in the division.
    const double cdf = static_cast<double>(n_total + 1 - rank) / static_cast<double>(n_total);
    points.push_back({values[rank - 1], rank, n_total, cdf});
  }
  return points;
}

/// Divides every value by the sample mean.
inline IntervalSample normalize_to_mean(const IntervalSample& sample) {
  const double m = sample.mean();
  std::vector<double> scaled(sample.values().begin(), sample.values().end());
  for (double& v : scaled) v /= m;
  return IntervalSample(std::move(scaled), sample.source(), "1");
}

}  // namespace sra
