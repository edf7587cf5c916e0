#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sra/poisson.hpp"
#include "sra/spad_sim.hpp"
#include "test_support.hpp"

using namespace sra;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::InvalidArgument;
}

}  // namespace

TEST(PoissonModel, Validation) {
  EXPECT_THROW(PoissonModel(0.0), Error);
  EXPECT_THROW(PoissonModel(-1.0), Error);
  EXPECT_THROW(PoissonModel(1.0, -1e-6), Error);
  EXPECT_NO_THROW(PoissonModel(1.0, 0.0));
}

TEST(ModelDensity, Examples) {
  EXPECT_EQ(model_density(PoissonModel(1.0), 0.0), 1.0);
  EXPECT_NEAR(model_density(PoissonModel(2.0), std::log(2.0) / 2.0), 1.0, 1e-15);
  EXPECT_EQ(model_density(PoissonModel(1.0, 1.0), 0.5), 0.0);
  EXPECT_EQ(model_density(PoissonModel(3.0, 1.0), 1.0), 3.0);
}

TEST(ModelSra, Examples) {
  EXPECT_NEAR(model_sra(PoissonModel(1.0), 10, 2), 2.302585092994046, 1e-15);
  EXPECT_NEAR(model_sra(PoissonModel(2.0), 2, 2), 0.34657359027997264, 1e-15);
  // n = N gives ln(N / (N - 1)) > 0.
  EXPECT_GT(model_sra(PoissonModel(1.0), 50, 50), 0.0);
  EXPECT_NEAR(model_sra(PoissonModel(1.0), 50, 50), std::log(50.0 / 49.0), 1e-16);
  EXPECT_EQ(code_of([] { (void)model_sra(PoissonModel(1.0), 10, 1); }), Errc::DivergentRank);
  EXPECT_EQ(code_of([] { (void)model_sra(PoissonModel(1.0), 10, 11); }), Errc::RankOutOfRange);
}

TEST(ModelSra, StrictlyDecreasing) {
  for (double lambda : {0.1, 1.0, 5000.0}) {
    for (double td : {0.0, 24e-6}) {
      const PoissonModel m(lambda, td);
      for (std::size_t n_total : {3u, 10u, 1000u}) {
        for (std::size_t r = 3; r <= n_total; ++r) {
          ASSERT_LT(model_sra(m, n_total, r), model_sra(m, n_total, r - 1));
        }
      }
    }
  }
}

// Ties the closed form to the rank-based CDF: exp(-lambda (s_n - t_d)) = (n - 1) / N,
// i.e. 1 - exp(...) = (N + 1 - n) / N.
TEST(ModelSra, RoundTripThroughCdf) {
  for (double lambda : {0.1, 1.0, 5000.0}) {
    const PoissonModel m(lambda, 0.5 / lambda);
    const std::size_t n_total = 1000;
    for (std::size_t r = 2; r <= n_total; ++r) {
      const double tail = std::exp(-lambda * (model_sra(m, n_total, r) - m.dead_time()));
      const double expected = static_cast<double>(r - 1) / static_cast<double>(n_total);
      ASSERT_NEAR(tail, expected, 4e-15 * (1.0 + std::log(static_cast<double>(n_total))));
      ASSERT_NEAR(1.0 - tail, static_cast<double>(n_total + 1 - r) / static_cast<double>(n_total),
                  1e-14);
    }
  }
}

TEST(FitMle, Examples) {
  EXPECT_DOUBLE_EQ(fit_mle(IntervalSample({1.0, 3.0})).model.lambda(), 0.5);
  EXPECT_DOUBLE_EQ(fit_mle(IntervalSample({0.5, 1.5}), 0.5).model.lambda(), 2.0);
  EXPECT_TRUE(std::isnan(fit_mle(IntervalSample({1.0, 3.0})).r_squared));
  EXPECT_EQ(code_of([] { (void)fit_mle(IntervalSample({1.0, 3.0}), 2.0); }),
            Errc::InconsistentDeadTime);
  EXPECT_EQ(code_of([] { (void)fit_mle(IntervalSample{}); }), Errc::EmptyInput);

  const auto fit = fit_mle(test::exp_sample(3, 100000, 5000.0, 24e-6), 24e-6);
  EXPECT_GE(fit.model.lambda(), 4950.0);
  EXPECT_LE(fit.model.lambda(), 5050.0);
  EXPECT_EQ(fit.method, FitMethod::Mle);
  EXPECT_EQ(fit.n_used, 100000u);
  EXPECT_EQ(fit.residual_fraction, 1.0 - fit.r_squared);
  EXPECT_LE(fit.r_squared, 1.0);
}

TEST(FitMle, ScaleEquivariance) {
  const auto base = test::exp_sample(8, 5000, 3.0, 0.01);
  for (double c : {0.5, 4.0, 1e-6}) {
    std::vector<double> scaled(base.values().begin(), base.values().end());
    for (double& v : scaled) v *= c;
    const double a = fit_mle(base, 0.01).model.lambda();
    const double b = fit_mle(IntervalSample(scaled), 0.01 * c).model.lambda();
    EXPECT_NEAR(b * c, a, 1e-12 * a);
  }
}

TEST(FitSraLeastSquares, NoiselessModelData) {
  const PoissonModel truth(2.0);
  const auto seq = model_sra_sequence(truth, 100);
  const auto fit = fit_sra_least_squares(seq);
  EXPECT_NEAR(fit.model.lambda(), 2.0, 1e-9);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  EXPECT_EQ(fit.method, FitMethod::SraLeastSquares);

  // N = 3 constructed exactly: s_2 = ln(3/1) + t_d, s_3 = ln(3/2) + t_d.
  const double td = 0.1;
  const auto three = RankedSequence::from_sorted({std::log(3.0) + td + 1.0, std::log(3.0) + td,
                                                  std::log(1.5) + td});
  EXPECT_NEAR(fit_sra_least_squares(three, td).model.lambda(), 1.0, 1e-9);
}

TEST(FitSraLeastSquares, RecoversRateAcrossScales) {
  for (double lambda : {0.1, 1.0, 5000.0}) {
    for (std::size_t n : {10u, 100u, 1000u}) {
      const auto seq = model_sra_sequence(PoissonModel(lambda), n);
      const double got = fit_sra_least_squares(seq).model.lambda();
      EXPECT_NEAR(got / lambda, 1.0, 1e-9) << lambda << ' ' << n;
    }
  }
}

// Empirical 3-sigma band from a 100-seed simulation oracle: [0.907, 1.113].
TEST(FitSraLeastSquares, ExponentialDrawsBand) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const double got = fit_sra_least_squares(build_sra(test::exp_sample(seed, 1000, 1.0)))
                           .model.lambda();
    EXPECT_GE(got, 0.85) << seed;
    EXPECT_LE(got, 1.15) << seed;
  }
}

TEST(FitSraLeastSquares, Errors) {
  EXPECT_EQ(code_of([] { (void)fit_sra_least_squares(RankedSequence::from_sorted({2, 1})); }),
            Errc::TooFewPoints);
  EXPECT_EQ(code_of([] {
              (void)fit_sra_least_squares(RankedSequence::from_sorted({3, 2, 1}), 5.0);
            }),
            Errc::NonPositiveScale);
}

TEST(R2Sra, Definitional) {
  const PoissonModel m(1.5, 0.2);
  EXPECT_EQ(r2_sra(model_sra_sequence(m, 50), m), 1.0);

  // Rank 1 is excluded; ranks 2..3 are compared against ln(3) and ln(1.5).
  const auto seq = RankedSequence::from_sorted({5.0, 2.0, 0.1});
  const double mean = (2.0 + 0.1) / 2.0;
  const double ss_tot = (2.0 - mean) * (2.0 - mean) + (0.1 - mean) * (0.1 - mean);
  const double ss_res = (2.0 - std::log(3.0)) * (2.0 - std::log(3.0)) +
                        (0.1 - std::log(1.5)) * (0.1 - std::log(1.5));
  EXPECT_NEAR(r2_sra(seq, PoissonModel(1.0)), 1.0 - ss_res / ss_tot, 1e-15);

  EXPECT_EQ(code_of([] { (void)r2_sra(RankedSequence::from_sorted({3, 2, 2}), PoissonModel(1)); }),
            Errc::DegenerateVariance);
  EXPECT_EQ(code_of([] { (void)r2_sra(RankedSequence::from_sorted({3, 2}), PoissonModel(1)); }),
            Errc::TooFewPoints);
}

TEST(R2, PredictingTheMeanGivesZero) {
  const std::vector<double> observed{4.0, 1.0, 2.5, 0.5};
  const std::vector<double> at_mean(4, 2.0);
  EXPECT_EQ(detail::r_squared(observed, at_mean), 0.0);
}

TEST(R2Hist, Definitional) {
  const PoissonModel m(2.0);
  Histogram h;
  h.edges = {0.0, 0.5, 1.0, 1.5};
  h.n_source = 100;
  h.counts = {1, 1, 1};
  for (std::size_t k = 0; k < 3; ++k) h.densities.push_back(model_density(m, h.center(k)));
  EXPECT_NEAR(r2_hist(h, m), 1.0, 1e-15);

  Histogram shifted = h;
  shifted.densities = {0.5, 1.0, 1.5};
  double ss_res = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double r = shifted.densities[k] - model_density(m, shifted.center(k));
    ss_res += r * r;
  }
  EXPECT_NEAR(r2_hist(shifted, m), 1.0 - ss_res / 0.5, 1e-14);

  Histogram two = h;
  two.edges = {0.0, 1.0, 2.0};
  two.densities = {0.5, 0.5};
  two.counts = {1, 1};
  EXPECT_EQ(code_of([&] { (void)r2_hist(two, m); }), Errc::TooFewPoints);
  Histogram flat = h;
  flat.densities = {0.5, 0.5, 0.5};
  EXPECT_EQ(code_of([&] { (void)r2_hist(flat, m); }), Errc::DegenerateVariance);
}

TEST(R2, HistogramWorseThanSraOnExponentialData) {
  int sra_better = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = normalize_to_mean(test::exp_sample(seed, 1000, 1.0));
    const auto fit = fit_sra_least_squares(build_sra(s));
    const double hist_r2 = r2_hist(build_histogram(s, BinningRule::mann_wald()), fit.model);
    if (1.0 - hist_r2 > fit.residual_fraction) ++sra_better;
  }
  EXPECT_GE(sra_better, 45);
}

TEST(R2, PermutationInvariant) {
  auto values = test::exp_values(4, 400, 2.0);
  const PoissonModel m(2.0);
  const double a = r2_sra(build_sra(IntervalSample(values)), m);
  const double ha = r2_hist(build_histogram(IntervalSample(values), BinningRule::mann_wald()), m);
  std::mt19937_64 rng(1);
  std::shuffle(values.begin(), values.end(), rng);
  EXPECT_EQ(r2_sra(build_sra(IntervalSample(values)), m), a);
  EXPECT_EQ(r2_hist(build_histogram(IntervalSample(values), BinningRule::mann_wald()), m), ha);
}
