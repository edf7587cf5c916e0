// Synthetic dark-count interval records: a Poisson process with a
// non-paralyzable dead time.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sra/error.hpp"
#include "sra/ranked.hpp"

namespace sra {

struct DetectorConfig {
  double dark_rate = 5000.0;  // 1/s
  double dead_time = 24e-6;   // s
  double efficiency = 0.15;   // metadata only
  std::size_t n_events = 100000;
  std::uint64_t seed = 0;

  void validate() const {
    if (!std::isfinite(dark_rate) || dark_rate <= 0.0) {
      throw Error(Errc::InvalidArgument, "dark rate must be finite and positive");
    }
    if (!std::isfinite(dead_time) || dead_time < 0.0) {
      throw Error(Errc::InvalidArgument, "dead time must be finite and non-negative");
    }
    if (!(efficiency > 0.0 && efficiency <= 1.0)) {
      throw Error(Errc::InvalidArgument, "efficiency must lie in (0, 1]");
    }
    if (n_events < 1) throw Error(Errc::InvalidArgument, "n_events must be >= 1");
  }
};

/// ID210-like record: 1e5 intervals, 24 us dead time, 15 % efficiency.
/// The 5000/s dark rate is a placeholder, not a measured value.
inline DetectorConfig default_detector_config() { return DetectorConfig{}; }

/// Uniform draw on the open interval (0, 1) from the top 53 bits of a
/// mt19937_64 output: u = (bits + 0.5) * 2^-53.
inline double open_unit_uniform(std::mt19937_64& rng) {
  constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
  return (static_cast<double>(rng() >> 11) + 0.5) * scale;
}

/// x_i = t_d + E_i with E_i = -ln(u_i) / rate, u_i from open_unit_uniform over
/// a mt19937_64 seeded with `config.seed`. Draw order is sequential.
inline IntervalSample simulate_intervals(const DetectorConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::vector<double> values(config.n_events);
  for (double& v : values) {
    v = config.dead_time - std::log(open_unit_uniform(rng)) / config.dark_rate;
  }
  return IntervalSample(std::move(values), "simulated:seed=" + std::to_string(config.seed));
}

}  // namespace sra
