#include "tfzeros/signal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tfz {

void TimeGrid::validate() const {
  if (n < 2) throw std::invalid_argument("TimeGrid: need at least 2 samples");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("TimeGrid: dt must be positive");
  if (!std::isfinite(t_start)) throw std::invalid_argument("TimeGrid: t_start must be finite");
}

TimeGrid TimeGrid::centered(double half_span, std::size_t n) {
  if (!(half_span > 0.0)) throw std::invalid_argument("TimeGrid: half span must be positive");
  TimeGrid g{-half_span, 2.0 * half_span / static_cast<double>(n), n};
  g.validate();
  return g;
}

DiscreteSignal::DiscreteSignal(TimeGrid g, std::vector<cplx> s) : grid(g), samples(std::move(s)) {
  grid.validate();
  if (samples.size() != grid.n) throw std::invalid_argument("DiscreteSignal: sample count differs from grid");
}

double DiscreteSignal::energy() const {
  double e = 0.0;
  for (const auto& v : samples) e += std::norm(v);
  return e * grid.dt;
}

void ChirpParams::validate() const {
  if (!(omega1 > 0.0) || !(omega2 > 0.0)) throw std::invalid_argument("chirp: frequencies must be positive");
  if (!(half_support > 0.0)) throw std::invalid_argument("chirp: half support must be positive");
}

void WaveParams::validate() const {
  if (!(amplitude > 0.0)) throw std::invalid_argument("wave: amplitude must be positive");
  if (!(d > 0.0)) throw std::invalid_argument("wave: d must be positive");
  if (!(phi >= 0.0 && phi < 2.0 * std::numbers::pi)) throw std::invalid_argument("wave: phi must lie in [0, 2pi)");
}

DiscreteSignal gen_sine(double amplitude, double omega, const TimeGrid& grid) {
  grid.validate();
  if (!(amplitude >= 0.0)) throw std::invalid_argument("sine: amplitude must be >= 0");
  std::vector<cplx> s(grid.n);
  for (std::size_t k = 0; k < grid.n; ++k) s[k] = amplitude * std::sin(omega * grid.time(k));
  return {grid, std::move(s)};
}

double chirp_envelope(const ChirpParams& p, double t) {
  const double T = p.half_support;
  const double a = std::abs(t);
  if (a >= T) return 0.0;
  const double flat = 0.8 * T;
  if (a <= flat) return 1.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (a - flat) / (T - flat)));
}

double chirp_frequency_law(const ChirpParams& p, double t) {
  return p.omega1 + (p.omega2 - p.omega1) * (t + p.half_support) / (2.0 * p.half_support);
}

DiscreteSignal gen_chirp(const ChirpParams& p, const TimeGrid& grid) {
  grid.validate();
  p.validate();
  std::vector<cplx> s(grid.n);
  for (std::size_t k = 0; k < grid.n; ++k) {
    const double t = grid.time(k);
    const double a = chirp_envelope(p, t);
    s[k] = a == 0.0 ? 0.0 : a * std::sin(chirp_frequency_law(p, t) * t);
  }
  return {grid, std::move(s)};
}

double wave_instantaneous_frequency(const WaveParams& p, double t) {
  if (t >= p.t0) throw std::domain_error("wave: instantaneous frequency undefined at or after t0");
  return 0.625 * p.d * std::pow(p.t0 - t, -0.375);
}

DiscreteSignal gen_wave(const WaveParams& p, const TimeGrid& grid) {
  grid.validate();
  p.validate();
  std::vector<cplx> s(grid.n);
  for (std::size_t k = 0; k < grid.n; ++k) {
    const double tau = p.t0 - grid.time(k);
    if (tau <= 0.0) continue;  // indicator of (-inf, t0)
    s[k] = p.amplitude * std::pow(tau, -0.25) * std::cos(p.d * std::pow(tau, 0.625) + p.phi);
  }
  return {grid, std::move(s)};
}

std::vector<double> hermite_all(int kmax, double t) {
  if (kmax < 0) throw std::invalid_argument("hermite: order must be >= 0");
  if (kmax > kHermiteMaxOrder)
    throw std::invalid_argument("hermite: order " + std::to_string(kmax) + " exceeds supported maximum " +
                                std::to_string(kHermiteMaxOrder));

  // Normalized three-term recurrence on h_k(t) e^{t^2/2}, with the Gaussian
  // factor and any accumulated rescaling applied per output in log space.
  constexpr double kBig = 1e200;
  std::vector<double> out(static_cast<std::size_t>(kmax) + 1);
  double log_scale = -0.5 * t * t;
  double prev = 0.0;
  double cur = std::pow(std::numbers::pi, -0.25);
  out[0] = cur * std::exp(log_scale);
  for (int k = 0; k < kmax; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * t * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kBig) {
      cur /= kBig;
      prev /= kBig;
      log_scale += std::log(kBig);
    }
    out[static_cast<std::size_t>(k) + 1] = cur * std::exp(log_scale);
  }
  return out;
}

double hermite(int k, double t) { return hermite_all(k, t).back(); }

std::vector<cplx> sample_discrete_white_noise(std::size_t n, SeededStream stream) {
  if (n == 0) throw std::invalid_argument("white noise: need at least one sample");
  Rng rng(stream);
  std::vector<cplx> xi(n);
  for (auto& v : xi) v = rng.complex_normal();
  return xi;
}

DiscreteSignal sample_discrete_white_noise(const TimeGrid& grid, SeededStream stream) {
  grid.validate();
  return {grid, sample_discrete_white_noise(grid.n, stream)};
}

DiscreteSignal sample_truncated_white_noise(int n_terms, const TimeGrid& grid, SeededStream stream) {
  grid.validate();
  if (n_terms < 0) throw std::invalid_argument("truncated noise: n_terms must be >= 0");
  if (n_terms > kHermiteMaxOrder) throw std::invalid_argument("truncated noise: n_terms exceeds Hermite range");
  Rng rng(stream);
  std::vector<cplx> coeffs(static_cast<std::size_t>(n_terms) + 1);
  for (auto& c : coeffs) c = rng.complex_normal();

  std::vector<cplx> s(grid.n);
  for (std::size_t k = 0; k < grid.n; ++k) {
    const auto h = hermite_all(n_terms, grid.time(k));
    cplx acc = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) acc += coeffs[j] * h[j];
    s[k] = acc;
  }
  return {grid, std::move(s)};
}

DiscreteSignal normalize_energy(const DiscreteSignal& s) {
  const double e = s.energy();
  if (!(e > 0.0)) throw std::invalid_argument("normalize_energy: signal has zero energy");
  DiscreteSignal out = s;
  const double scale = 1.0 / std::sqrt(e);
  for (auto& v : out.samples) v *= scale;
  return out;
}

DiscreteSignal mix(const DiscreteSignal& s, const DiscreteSignal& noise, double snr) {
  if (!(s.grid == noise.grid)) throw std::invalid_argument("mix: signal and noise grids differ");
  if (!(snr >= 0.0)) throw std::invalid_argument("mix: snr must be >= 0");
  if (std::isinf(snr)) return s;
  DiscreteSignal y = noise;
  for (std::size_t k = 0; k < y.samples.size(); ++k) y.samples[k] += snr * s.samples[k];
  return y;
}

}  // namespace tfz
