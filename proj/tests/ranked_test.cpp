#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "sra/ranked.hpp"
#include "sra/spad_sim.hpp"
#include "test_support.hpp"

using namespace sra;

namespace {

std::vector<double> as_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(IntervalSample, RejectsNonPositiveAndNonFinite) {
  EXPECT_NO_THROW(IntervalSample({1.0, 2.0}));
  for (double bad : {0.0, -1.0, std::nan(""), static_cast<double>(INFINITY)}) {
    try {
      IntervalSample s({1.0, bad});
      FAIL() << "accepted " << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::InvalidInterval);
      EXPECT_EQ(e.position(), 1u);
    }
  }
}

TEST(BuildSra, SortsDescending) {
  EXPECT_EQ(as_vector(build_sra(IntervalSample({1.0, 3.0, 2.0})).values()),
            (std::vector<double>{3.0, 2.0, 1.0}));
  EXPECT_EQ(as_vector(build_sra(IntervalSample({5.0})).values()), (std::vector<double>{5.0}));
  EXPECT_EQ(as_vector(build_sra(IntervalSample({2.0, 2.0, 7.0})).values()),
            (std::vector<double>{7.0, 2.0, 2.0}));
}

TEST(BuildSra, EmptyInput) {
  try {
    build_sra(IntervalSample{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyInput);
  }
}

TEST(BuildSra, NoninvasiveAndIdempotent) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 300;
    // Coarse values force plenty of ties.
    std::vector<double> x(n);
    for (double& v : x) v = 0.25 * static_cast<double>(1 + rng() % 40);
    const auto sra_seq = build_sra(IntervalSample(x));

    auto sorted_in = x;
    std::sort(sorted_in.begin(), sorted_in.end());
    auto sorted_out = as_vector(sra_seq.values());
    EXPECT_TRUE(std::is_sorted(sorted_out.rbegin(), sorted_out.rend()));
    std::sort(sorted_out.begin(), sorted_out.end());
    EXPECT_EQ(sorted_in, sorted_out);

    EXPECT_EQ(rank_values(sra_seq.values()), sra_seq);
  }
}

TEST(RankedSequence, FromSortedValidatesOrder) {
  EXPECT_NO_THROW(RankedSequence::from_sorted({3.0, 3.0, 1.0}));
  EXPECT_THROW(RankedSequence::from_sorted({1.0, 3.0}), Error);
  const auto r = RankedSequence::from_sorted({9.0, 7.0});
  EXPECT_EQ(r.at_rank(1), 9.0);
  EXPECT_EQ(r.at_rank(2), 7.0);
  EXPECT_THROW((void)r.at_rank(3), Error);
}

TEST(Ecdf, DirectSubstitution) {
  const auto pts = ecdf(RankedSequence::from_sorted({9, 7, 4, 2}));
  ASSERT_EQ(pts.size(), 4u);
  const double expected[] = {1.0, 0.75, 0.5, 0.25};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(pts[i].cdf, expected[i]);
    EXPECT_EQ(pts[i].rank, i + 1);
  }
  EXPECT_EQ(pts[1].value, 7.0);

  const auto single = ecdf(RankedSequence::from_sorted({42.0}));
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].cdf, 1.0);
}

TEST(Ecdf, LastRankOfThousand) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(1000 - i);
  const auto pts = ecdf(RankedSequence::from_sorted(v));
  EXPECT_EQ(pts.back().rank, 1000u);
  EXPECT_DOUBLE_EQ(pts.back().cdf, 0.001);
  EXPECT_EQ(pts.front().cdf, 1.0);
  for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_LT(pts[i].cdf, pts[i - 1].cdf);
}

TEST(Ecdf, RankIdentityAsFraction) {
  for (std::size_t n = 1; n <= 64; ++n) {
    std::vector<double> v(n, 1.0);
    for (const auto& p : ecdf(RankedSequence::from_sorted(v))) {
      const auto [num, den] = p.cdf_fraction();
      EXPECT_EQ(num, n + 1 - p.rank);
      EXPECT_EQ(den, n);
      EXPECT_EQ(p.cdf, static_cast<double>(num) / static_cast<double>(den));
    }
  }
}

TEST(NormalizeToMean, Examples) {
  const auto a = normalize_to_mean(IntervalSample({2.0, 4.0}));
  EXPECT_DOUBLE_EQ(a.values()[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(a.values()[1], 4.0 / 3.0);
  EXPECT_EQ(normalize_to_mean(IntervalSample({5.0})).values()[0], 1.0);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = test::exp_sample(seed, 500, 3000.0, 24e-6);
    EXPECT_NEAR(normalize_to_mean(s).mean(), 1.0, 1e-12);
  }
}

// Plotting positions (N + 1 - n) / N converge to the true CDF: the max gap at
// N = 1e4 is typically smaller than at N = 1e2.
TEST(Ecdf, ConvergesToExponentialCdf) {
  const double rate = 2.0;
  auto max_gap = [&](std::uint64_t seed, std::size_t n) {
    const auto pts = ecdf(build_sra(test::exp_sample(seed, n, rate)));
    double gap = 0.0;
    for (const auto& p : pts) gap = std::max(gap, std::abs((1.0 - std::exp(-rate * p.value)) - p.cdf));
    return gap;
  };
  std::vector<double> small;
  std::vector<double> large;
  for (std::uint64_t t = 0; t < 50; ++t) {
    small.push_back(max_gap(1000 + t, 100));
    large.push_back(max_gap(2000 + t, 10000));
  }
  EXPECT_LT(test::median(large), test::median(small));
}
