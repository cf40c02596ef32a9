#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "tfzeros/random.hpp"

namespace tfz {

using cplx = std::complex<double>;

/// Uniform sampling grid: sample k sits at t_start + k * dt.
struct TimeGrid {
  double t_start = 0.0;
  double dt = 1.0;
  std::size_t n = 0;

  /// Throws std::invalid_argument unless n >= 2 and dt > 0.
  void validate() const;

  double time(std::size_t k) const { return t_start + static_cast<double>(k) * dt; }
  double t_end() const { return time(n - 1); }

  /// n samples covering [-half_span, half_span) with dt = 2 * half_span / n.
  static TimeGrid centered(double half_span, std::size_t n);

  bool operator==(const TimeGrid&) const = default;
};

struct DiscreteSignal {
  TimeGrid grid;
  std::vector<cplx> samples;

  DiscreteSignal() = default;
  DiscreteSignal(TimeGrid g, std::vector<cplx> s);

  /// sum |s_k|^2 dt
  double energy() const;
};

enum class Envelope {
  /// Equal to 1 on [-0.8T, 0.8T], raised-cosine taper to 0 at +-T.
  TukeyBump,
};

struct ChirpParams {
  double omega1 = 1.0;
  double omega2 = 2.0;
  double half_support = 1.0;  // T
  Envelope envelope = Envelope::TukeyBump;

  void validate() const;
};

struct WaveParams {
  double amplitude = 1.0;  // C
  double d = 1.0;
  double phi = 0.0;
  double t0 = 0.0;

  void validate() const;
};

/// Marker for the noiseless mixture y = s.
inline constexpr double kInfiniteSnr = std::numeric_limits<double>::infinity();

/// Highest Hermite order accepted by hermite() and the truncated noise sampler.
inline constexpr int kHermiteMaxOrder = 4096;

DiscreteSignal gen_sine(double amplitude, double omega, const TimeGrid& grid);
DiscreteSignal gen_chirp(const ChirpParams& p, const TimeGrid& grid);
DiscreteSignal gen_wave(const WaveParams& p, const TimeGrid& grid);

double chirp_envelope(const ChirpParams& p, double t);
/// The linear frequency law omega(t) = omega1 + (omega2 - omega1)(t + T)/(2T).
double chirp_frequency_law(const ChirpParams& p, double t);
/// (5d/8)(t0 - t)^(-3/8), the derivative of the phase d(t0 - t)^(5/8).
double wave_instantaneous_frequency(const WaveParams& p, double t);

/// L2-normalized Hermite function h_k(t).
double hermite(int k, double t);
/// h_0(t), ..., h_kmax(t) in one pass of the recurrence.
std::vector<double> hermite_all(int kmax, double t);

/// n i.i.d. N_C(0,1) draws.
std::vector<cplx> sample_discrete_white_noise(std::size_t n, SeededStream stream);
DiscreteSignal sample_discrete_white_noise(const TimeGrid& grid, SeededStream stream);

/// sum_{j=0}^{n_terms} xi_j h_j(t_k) with xi_j ~ N_C(0,1).
DiscreteSignal sample_truncated_white_noise(int n_terms, const TimeGrid& grid, SeededStream stream);

/// Copy of s scaled to unit energy; throws if s has zero energy.
DiscreteSignal normalize_energy(const DiscreteSignal& s);

/// y = snr * s + noise. snr = kInfiniteSnr returns s unchanged. Callers pass
/// an energy-normalized s so that snr means the same across templates.
DiscreteSignal mix(const DiscreteSignal& s, const DiscreteSignal& noise, double snr);

}  // namespace tfz
