// Simulates a short dark-count record and compares the SRA with histograms.
#include <cstdio>

#include "sra/sra.hpp"

int main() {
  sra::DetectorConfig config = sra::default_detector_config();
  config.n_events = 20000;
  config.seed = 1;
  const auto sample = sra::simulate_intervals(config);

  const auto head = sample.head(1000);
  const auto sra_seq = sra::build_sra(head);
  const auto fit = sra::fit_sra_least_squares(sra_seq, config.dead_time);
  std::printf("rate estimate %.1f /s (true %.1f), R^2 on SRA %.5f\n", fit.model.lambda(),
              config.dark_rate, fit.r_squared);

  for (const auto rule : {sra::BinningRule::sturges(), sra::BinningRule::mann_wald()}) {
    const auto hist = sra::build_histogram(head, rule);
    std::printf("%-10s N_h=%zu  R^2 on density %.5f\n", rule.name().c_str(), hist.bin_count(),
                sra::r2_hist(hist, fit.model));
  }

  const auto set = sra::split_subsamples(sample, 20, 1000);
  std::printf("eps_sra=%.5f eps_hist=%.5f (Q=20, N=1000)\n", sra::epsilon_sra(set),
              sra::epsilon_hist(set, sra::BinningRule::mann_wald()));
  return 0;
}
