// Histograms of interval samples under the Sturges, Mann-Wald and N/10
// partitioning criteria.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sra/error.hpp"
#include "sra/ranked.hpp"

namespace sra {

/// ceil(log2 n) + 1; bins_sturges(1) == 1.
constexpr std::size_t bins_sturges(std::size_t n) {
  if (n == 0) throw Error(Errc::TooFewPoints, "Sturges criterion needs n >= 1");
  return static_cast<std::size_t>(std::bit_width(n - 1)) + 1;
}

/// Mann-Wald criterion 4 * (3 (n - 1)^2 / 4)^(1/5), rounded half up.
inline std::size_t bins_mann_wald(std::size_t n) {
  if (n < 2) throw Error(Errc::TooFewPoints, "Mann-Wald criterion needs n >= 2");
  const double nm1 = static_cast<double>(n - 1);
  const double raw = 4.0 * std::pow(0.75 * nm1 * nm1, 0.2);
  return static_cast<std::size_t>(std::floor(raw + 0.5));
}

/// Maximum partitioning parameter floor(n / 10).
constexpr std::size_t bins_max_tenth(std::size_t n) {
  if (n < 10) throw Error(Errc::TooFewPoints, "N/10 criterion needs n >= 10");
  return n / 10;
}

class BinningRule {
 public:
  enum class Kind { Sturges, MannWald, MaxTenth, Explicit };

  static constexpr BinningRule sturges() noexcept { return BinningRule(Kind::Sturges, 0); }
  static constexpr BinningRule mann_wald() noexcept { return BinningRule(Kind::MannWald, 0); }
  static constexpr BinningRule max_tenth() noexcept { return BinningRule(Kind::MaxTenth, 0); }
  static BinningRule explicit_bins(std::size_t bins) {
    if (bins < 1) throw Error(Errc::InvalidArgument, "explicit bin count must be >= 1");
    return BinningRule(Kind::Explicit, bins);
  }

  /// Parses "sturges", "mann-wald", "max-tenth" or a positive integer.
  static BinningRule parse(const std::string& text) {
    if (text == "sturges") return sturges();
    if (text == "mann-wald") return mann_wald();
    if (text == "max-tenth") return max_tenth();
    std::size_t used = 0;
    unsigned long long bins = 0;
    try {
      bins = std::stoull(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() || text.front() == '-') {
      throw Error(Errc::InvalidArgument, "unknown binning rule '" + text + "'");
    }
    return explicit_bins(static_cast<std::size_t>(bins));
  }

  [[nodiscard]] constexpr Kind kind() const noexcept { return kind_; }

  /// N_h for a sample of size n.
  [[nodiscard]] std::size_t bins_for(std::size_t n) const {
    switch (kind_) {
      case Kind::Sturges: return bins_sturges(n);
      case Kind::MannWald: return bins_mann_wald(n);
      case Kind::MaxTenth: return bins_max_tenth(n);
      case Kind::Explicit: return explicit_bins_;
    }
    return explicit_bins_;
  }

  [[nodiscard]] std::string name() const {
    switch (kind_) {
      case Kind::Sturges: return "sturges";
      case Kind::MannWald: return "mann-wald";
      case Kind::MaxTenth: return "max-tenth";
      case Kind::Explicit: return std::to_string(explicit_bins_);
    }
    return {};
  }

  friend constexpr bool operator==(const BinningRule&, const BinningRule&) = default;

 private:
  constexpr BinningRule(Kind kind, std::size_t bins) noexcept : kind_(kind), explicit_bins_(bins) {}

  Kind kind_;
  std::size_t explicit_bins_;
};

struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  std::vector<double> densities;  // count / (N * width)
  BinningRule rule = BinningRule::mann_wald();
  std::size_t n_source = 0;

  [[nodiscard]] std::size_t bin_count() const noexcept { return counts.size(); }
  [[nodiscard]] double width(std::size_t m) const { return edges.at(m + 1) - edges.at(m); }
  [[nodiscard]] double center(std::size_t m) const {
    return 0.5 * (edges.at(m) + edges.at(m + 1));
  }
  [[nodiscard]] std::vector<double> centers() const {
    std::vector<double> out(bin_count());
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = center(m);
    return out;
  }

  friend bool operator==(const Histogram&, const Histogram&) = default;
};

/// `bins` equal-width edges over [lo, hi]; the last edge is exactly hi.
inline std::vector<double> equal_width_edges(double lo, double hi, std::size_t bins) {
  if (bins < 1) throw Error(Errc::InvalidArgument, "need at least one bin");
  if (!(hi > lo)) throw Error(Errc::DegenerateRange, "zero-width data range");
  std::vector<double> edges(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i < bins; ++i) edges[i] = lo + static_cast<double>(i) * width;
  edges[bins] = hi;
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) {
      throw Error(Errc::DegenerateRange, "data range too narrow for the bin count");
    }
  }
  return edges;
}

/// Bin index with right-open bins, except the last which is closed.
/// Caller guarantees edges.front() <= x <= edges.back().
inline std::size_t bin_index(std::span<const double> edges, double x) {
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  const auto idx = static_cast<std::size_t>(it - edges.begin());
  const std::size_t bins = edges.size() - 1;
  return idx == 0 ? 0 : std::min(idx - 1, bins - 1);
}

/// Counts over fixed edges without validation of coverage.
inline std::vector<std::size_t> count_into(std::span<const double> values,
                                           std::span<const double> edges) {
  const std::size_t bins = edges.size() - 1;
  std::vector<std::size_t> counts(bins, 0);
  const double lo = edges.front();
  const double scale = static_cast<double>(bins) / (edges.back() - lo);
  for (double x : values) {
    // Proportional guess, accepted only if the edges agree with it.
    const double pos = (x - lo) * scale;
    std::size_t m = pos <= 0.0 ? 0 : std::min(static_cast<std::size_t>(pos), bins - 1);
    const bool inside = x >= edges[m] && (m + 1 == bins || x < edges[m + 1]);
    if (!inside) m = bin_index(edges, x);
    ++counts[m];
  }
  return counts;
}

/// Histogram of `values`. Equal-width bins over [min, max] with N_h from `rule`
/// unless `edges_override` supplies the edges.
inline Histogram build_histogram(std::span<const double> values, BinningRule rule,
                                 std::optional<std::span<const double>> edges_override = {}) {
  if (values.empty()) throw Error(Errc::EmptyInput, "histogram of an empty sample");
  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *min_it;
  const double hi = *max_it;

  Histogram hist;
  hist.n_source = values.size();
  if (edges_override) {
    const auto e = *edges_override;
    if (e.size() < 2) throw Error(Errc::InvalidEdges, "edges need at least two entries");
    for (std::size_t i = 1; i < e.size(); ++i) {
      if (!(e[i] > e[i - 1])) throw Error(Errc::InvalidEdges, "edges not strictly increasing", i);
    }
    if (e.front() > lo || e.back() < hi) {
      throw Error(Errc::EdgesDoNotCover, "edges do not cover the data range");
    }
    hist.edges.assign(e.begin(), e.end());
    hist.rule = BinningRule::explicit_bins(e.size() - 1);
  } else {
    if (!(hi > lo)) throw Error(Errc::DegenerateRange, "all values are identical");
    hist.edges = equal_width_edges(lo, hi, rule.bins_for(values.size()));
    hist.rule = rule;
  }

  hist.counts = count_into(values, hist.edges);
  hist.densities.resize(hist.counts.size());
  const double n = static_cast<double>(values.size());
  for (std::size_t m = 0; m < hist.counts.size(); ++m) {
    hist.densities[m] = static_cast<double>(hist.counts[m]) / (n * hist.width(m));
  }
  return hist;
}

inline Histogram build_histogram(const IntervalSample& sample, BinningRule rule,
                                 std::optional<std::span<const double>> edges_override = {}) {
  return build_histogram(sample.values(), rule, edges_override);
}

inline Histogram build_histogram(const RankedSequence& sra, BinningRule rule,
                                 std::optional<std::span<const double>> edges_override = {}) {
  return build_histogram(sra.values(), rule, edges_override);
}

/// z = N (x - x_min) / (x_max - x_min), mapping the sample onto [0, N].
inline std::vector<double> normalized_coordinate(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::EmptyInput, "normalized coordinate of an empty sample");
  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *min_it;
  const double hi = *max_it;
  if (!(hi > lo)) throw Error(Errc::DegenerateRange, "all values are identical");
  const double n = static_cast<double>(values.size());
  std::vector<double> z(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    z[i] = values[i] == hi ? n : n * (values[i] - lo) / (hi - lo);
  }
  return z;
}

inline std::vector<double> normalized_coordinate(const IntervalSample& sample) {
  return normalized_coordinate(sample.values());
}

}  // namespace sra
