#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace tfz {

/// Identifies one reproducible random sequence. Identical (seed, stream_id)
/// pairs always yield identical draws; distinct stream ids are independent.
struct SeededStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  bool operator==(const SeededStream&) const = default;
};

/// Child stream for sub-task `index`. Used to hand every Monte Carlo replicate
/// its own stream so results do not depend on execution order.
SeededStream derive(SeededStream parent, std::uint64_t index);

class Rng {
 public:
  explicit Rng(SeededStream stream);

  double uniform();                     // [0, 1)
  double uniform(double lo, double hi); // [lo, hi)
  double normal();                      // N(0, 1)
  std::uint64_t poisson(double mean);

  /// Standard complex Gaussian N_C(0,1): (x + iy)/sqrt(2), x, y ~ N(0,1).
  std::complex<double> complex_normal();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace tfz
