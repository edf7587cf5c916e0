// Subsample deviation factor epsilon(N) and the SRA-vs-histogram stability
// experiment over a grid of subsample lengths.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <future>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "sra/binning.hpp"
#include "sra/error.hpp"
#include "sra/ranked.hpp"

namespace sra {

/// Q rows x_{q,k} of identical length N.
class SubsampleSet {
 public:
  explicit SubsampleSet(std::vector<std::vector<double>> rows) : rows_(std::move(rows)) {
    if (rows_.size() < 2) throw Error(Errc::TooFewPoints, "need at least two subsamples");
    for (const auto& row : rows_) {
      if (row.size() != rows_.front().size()) {
        throw Error(Errc::InvalidArgument, "subsamples differ in length");
      }
    }
    if (rows_.front().empty()) throw Error(Errc::EmptyInput, "subsamples are empty");
  }

  [[nodiscard]] std::size_t q_count() const noexcept { return rows_.size(); }
  [[nodiscard]] std::size_t n_len() const noexcept { return rows_.front().size(); }
  [[nodiscard]] const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }

 private:
  std::vector<std::vector<double>> rows_;
};

enum class Subsampling { Contiguous, RandomBlocks };

/// First q contiguous non-overlapping blocks of length n. RandomBlocks picks q
/// distinct aligned blocks in a seeded random order instead.
inline SubsampleSet split_subsamples(const IntervalSample& sample, std::size_t q, std::size_t n,
                                     Subsampling mode = Subsampling::Contiguous,
                                     std::uint64_t seed = 0) {
  if (q == 0 || n == 0) throw Error(Errc::InvalidArgument, "q and n must be positive");
  if (q > sample.size() / n) {
    throw Error(Errc::InsufficientData, "need " + std::to_string(q) + " x " + std::to_string(n) +
                                            " points, sample has " +
                                            std::to_string(sample.size()));
  }
  std::vector<std::size_t> blocks(sample.size() / n);
  std::iota(blocks.begin(), blocks.end(), std::size_t{0});
  if (mode == Subsampling::RandomBlocks) {
    std::mt19937_64 rng(seed);
    // Fisher-Yates with an explicit bounded draw; std::shuffle is not portable.
    for (std::size_t i = blocks.size(); i > 1; --i) {
      const std::uint64_t bound = i;
      const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
      std::uint64_t r = 0;
      do {
        r = rng();
      } while (r >= limit);
      std::swap(blocks[i - 1], blocks[static_cast<std::size_t>(r % bound)]);
    }
  }
  const auto values = sample.values();
  std::vector<std::vector<double>> rows;
  rows.reserve(q);
  for (std::size_t i = 0; i < q; ++i) {
    const auto first = values.begin() + static_cast<std::ptrdiff_t>(blocks[i] * n);
    rows.emplace_back(first, first + static_cast<std::ptrdiff_t>(n));
  }
  return SubsampleSet(std::move(rows));
}

/// Ratio of the mean within-column scatter to the variance of the column means:
/// [Q^-1 sum_k sum_q (x_qk - y_k)^2] / [sum_k (y_k - y)^2].
///
/// Columns are accumulated as offsets from the first row, so identical rows
/// yield exactly zero.
inline double deviation_factor(std::span<const std::vector<double>> rows) {
  if (rows.size() < 2) throw Error(Errc::TooFewPoints, "deviation factor needs Q >= 2 rows");
  const std::size_t len = rows.front().size();
  if (len < 2) throw Error(Errc::TooFewPoints, "deviation factor needs rows of length >= 2");
  for (const auto& row : rows) {
    if (row.size() != len) throw Error(Errc::InvalidArgument, "rows differ in length");
  }
  const double q = static_cast<double>(rows.size());
  const auto& base = rows.front();

  std::vector<double> offset_mean(len, 0.0);
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < len; ++k) offset_mean[k] += row[k] - base[k];
  }
  for (double& m : offset_mean) m /= q;

  double scatter = 0.0;
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < len; ++k) {
      const double d = (row[k] - base[k]) - offset_mean[k];
      scatter += d * d;
    }
  }

  std::vector<double> col_mean(len);
  for (std::size_t k = 0; k < len; ++k) col_mean[k] = base[k] + offset_mean[k];
  const double grand = std::accumulate(col_mean.begin(), col_mean.end(), 0.0) /
                       static_cast<double>(len);
  double spread = 0.0;
  for (double y : col_mean) spread += (y - grand) * (y - grand);
  if (!(spread > 0.0)) {
    throw Error(Errc::DegenerateDenominator, "averaged row is constant");
  }
  return (scatter / q) / spread;
}

inline double epsilon_sra(const SubsampleSet& set) {
  // Equal positive doubles are bit-identical, so an unstable sort ranks the
  // same as build_sra.
  std::vector<std::vector<double>> ranked = set.rows();
  for (auto& row : ranked) std::sort(row.begin(), row.end(), std::greater<>{});
  return deviation_factor(ranked);
}

/// How histogram rows are aligned across subsamples.
enum class EdgeMode {
  PerSubsample,  // each subsample binned over its own [min, max]
  Shared,        // one set of edges over the pooled [min, max]
};

inline double epsilon_hist(const SubsampleSet& set, BinningRule rule,
                           EdgeMode mode = EdgeMode::PerSubsample) {
  const std::size_t bins = rule.bins_for(set.n_len());
  if (bins < 2) throw Error(Errc::TooFewPoints, "histogram rows need N_h >= 2");

  std::vector<std::vector<double>> counts;
  counts.reserve(set.q_count());
  auto to_row = [](const std::vector<std::size_t>& c) {
    return std::vector<double>(c.begin(), c.end());
  };
  if (mode == EdgeMode::Shared) {
    double lo = set.rows().front().front();
    double hi = lo;
    for (const auto& row : set.rows()) {
      const auto [a, b] = std::minmax_element(row.begin(), row.end());
      lo = std::min(lo, *a);
      hi = std::max(hi, *b);
    }
    const auto edges = equal_width_edges(lo, hi, bins);
    for (const auto& row : set.rows()) counts.push_back(to_row(count_into(row, edges)));
  } else {
    for (const auto& row : set.rows()) {
      counts.push_back(to_row(build_histogram(std::span<const double>(row), rule).counts));
    }
  }
  return deviation_factor(counts);
}

struct StabilityOptions {
  EdgeMode edges = EdgeMode::PerSubsample;
  Subsampling subsampling = Subsampling::Contiguous;
  std::uint64_t seed = 0;
  unsigned threads = 1;  // 0 = hardware concurrency
};

struct StabilityCurve {
  std::vector<std::size_t> n_grid;
  std::vector<double> eps_sra;
  std::vector<double> eps_hist;
  std::size_t q_count = 0;
  BinningRule binning = BinningRule::mann_wald();

  [[nodiscard]] std::optional<std::size_t> index_of(std::size_t n) const {
    const auto it = std::find(n_grid.begin(), n_grid.end(), n);
    if (it == n_grid.end()) return std::nullopt;
    return static_cast<std::size_t>(it - n_grid.begin());
  }
};

/// N = 20 j for j = 1..50.
inline std::vector<std::size_t> default_n_grid() {
  std::vector<std::size_t> grid;
  for (std::size_t j = 1; j <= 50; ++j) grid.push_back(20 * j);
  return grid;
}

inline StabilityCurve stability_curve(const IntervalSample& sample, std::size_t q,
                                      std::span<const std::size_t> n_grid, BinningRule rule,
                                      const StabilityOptions& options = {}) {
  if (n_grid.empty()) throw Error(Errc::InvalidArgument, "empty N grid");
  const std::size_t n_max = *std::max_element(n_grid.begin(), n_grid.end());
  if (q == 0 || n_max == 0) throw Error(Errc::InvalidArgument, "q and N must be positive");
  if (q > sample.size() / n_max) {
    throw Error(Errc::InsufficientData, "need at least " + std::to_string(q * n_max) +
                                            " points, sample has " +
                                            std::to_string(sample.size()));
  }

  StabilityCurve curve;
  curve.n_grid.assign(n_grid.begin(), n_grid.end());
  curve.eps_sra.resize(n_grid.size());
  curve.eps_hist.resize(n_grid.size());
  curve.q_count = q;
  curve.binning = rule;

  auto evaluate = [&](std::size_t i) {
    const auto set =
        split_subsamples(sample, q, curve.n_grid[i], options.subsampling, options.seed);
    curve.eps_sra[i] = epsilon_sra(set);
    curve.eps_hist[i] = epsilon_hist(set, rule, options.edges);
  };

  unsigned threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_grid.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < n_grid.size(); ++i) evaluate(i);
    return curve;
  }
  // Strided partition; each grid point writes only its own slot.
  std::vector<std::future<void>> jobs;
  for (unsigned t = 0; t < threads; ++t) {
    jobs.push_back(std::async(std::launch::async, [&, t] {
      for (std::size_t i = t; i < n_grid.size(); i += threads) evaluate(i);
    }));
  }
  for (auto& job : jobs) job.get();
  return curve;
}

}  // namespace sra
