#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "tfzeros/signal.hpp"

namespace tfz {

/// Unnormalized DFT: out_k = sum_j x_j exp(-2 i pi k j / n). Throws on empty input.
std::vector<cplx> dft(std::span<const cplx> x);

/// Prefactor of the circular Gaussian window exp(-t^2/2).
enum class WindowNorm {
  UnitEnergy,   // pi^{-1/4}: ||g||_2 = 1, the convention all energy and oracle identities use
  PiMinusHalf,  // pi^{-1/2}
};

double window_prefactor(WindowNorm norm);

/// Gaussian window sampled at multiples of dt, values[j] = g((j - half_width) dt),
/// truncated where g falls below `rel_cutoff` times its peak.
struct GaussianWindow {
  double dt = 0.0;
  std::size_t half_width = 0;
  WindowNorm norm = WindowNorm::UnitEnergy;
  std::vector<double> values;

  double offset(std::size_t j) const { return (static_cast<double>(j) - static_cast<double>(half_width)) * dt; }
  /// sum g^2 dt
  double discrete_energy() const;
};

inline constexpr double kWindowCutoff = 1e-12;

GaussianWindow gaussian_window(const TimeGrid& time_grid, WindowNorm norm = WindowNorm::UnitEnergy,
                               double rel_cutoff = kWindowCutoff);

/// Continuous window value g(t).
double gaussian_window_value(double t, WindowNorm norm = WindowNorm::UnitEnergy);

/// Time-frequency sampling lattice. Analysis times are every `hop`-th sample
/// of the signal grid; frequencies are omega_start + l * domega with the
/// FFT-compatible spacing domega = 2 pi / (n dt).
struct TFGrid {
  TimeGrid time_grid;
  std::size_t hop = 1;
  double omega_start = 0.0;
  std::size_t n_freq = 0;

  void validate() const;

  double domega() const;
  std::size_t n_time() const { return (time_grid.n + hop - 1) / hop; }
  double time_step() const { return time_grid.dt * static_cast<double>(hop); }
  double time(std::size_t k) const { return time_grid.time(k * hop); }
  double omega(std::size_t l) const { return omega_start + static_cast<double>(l) * domega(); }
  double omega_end() const { return omega(n_freq - 1); }

  /// Frequencies covering [omega_min, omega_max] starting exactly at omega_min.
  static TFGrid band(const TimeGrid& time_grid, double omega_min, double omega_max, std::size_t hop = 1);
  /// All n FFT bins, centered on zero: omega_start = -floor(n/2) * domega.
  static TFGrid full(const TimeGrid& time_grid, std::size_t hop = 1);

  bool operator==(const TFGrid&) const = default;
};

/// Complex STFT values, row-major with one row per analysis time.
struct TFMatrix {
  TFGrid grid;
  std::vector<cplx> values;

  std::size_t rows() const { return grid.n_time(); }
  std::size_t cols() const { return grid.n_freq; }
  const cplx& at(std::size_t k, std::size_t l) const { return values[k * grid.n_freq + l]; }
  cplx& at(std::size_t k, std::size_t l) { return values[k * grid.n_freq + l]; }
};

struct Spectrogram {
  TFGrid grid;
  std::vector<double> values;

  std::size_t rows() const { return grid.n_time(); }
  std::size_t cols() const { return grid.n_freq; }
  double at(std::size_t k, std::size_t l) const { return values[k * grid.n_freq + l]; }
};

struct StftOptions {
  WindowNorm norm = WindowNorm::UnitEnergy;
  double window_cutoff = kWindowCutoff;
  unsigned workers = 1;
};

/// Discrete STFT:
///   V[k, l] = sum_j s_j g(t_j - tau_k) exp(-i omega_l t_j) dt
/// with the signal zero outside its grid. One windowed FFT of length n per
/// analysis time.
TFMatrix stft(const DiscreteSignal& s, const TFGrid& grid, const StftOptions& opts = {});

/// Elementwise squared modulus.
Spectrogram spectrogram(const TFMatrix& v);

/// Energy share of g^2 beyond distance 3 of its centre (0.5 erfc(3)).
inline constexpr double kBorderEnergyFraction = 1.1e-5;

/// Rows whose window puts more than `max_outside_fraction` of its energy on
/// the zero padding outside the signal support. The default flags rows within
/// about 3 time units of either end.
std::vector<bool> border_rows(const TFGrid& grid, WindowNorm norm = WindowNorm::UnitEnergy,
                              double max_outside_fraction = kBorderEnergyFraction);

/// Direct quadrature of the continuous STFT at an arbitrary (t, omega).
cplx stft_at(const DiscreteSignal& s, double t, double omega, WindowNorm norm = WindowNorm::UnitEnergy);

/// Closed-form Gaussian spectrogram of h_k:
///   (t^2 + omega^2)^k exp(-(t^2 + omega^2)/2) / (2^k k!)
double hermite_spectrogram_oracle(int k, double t, double omega);

/// Bargmann transform by direct quadrature of
///   B s(w) = pi^{-1/4} exp(-w^2/2) int s(t) exp(sqrt2 t w - t^2/2) dt.
/// With z = omega + i t and the unit-energy window,
///   V s(t, omega) = exp(-t^2/2 + w^2/2) B s(w),  w = -i z / sqrt2,
/// so |V s(t, omega)| = exp(-|z|^2/4) |B s(-i z / sqrt2)|.
/// Throws std::domain_error when the integrand is not resolved by the grid.
cplx bargmann(const DiscreteSignal& s, cplx w);

}  // namespace tfz
