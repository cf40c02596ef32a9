#include "tfzeros/stft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "tfzeros/parallel.hpp"

namespace tfz {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans use FFTW_ESTIMATE so the chosen algorithm, and therefore
// every output bit, is the same from run to run.
class FftBuffer {
 public:
  explicit FftBuffer(std::size_t n)
      : n_(n), data_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (!data_) throw std::bad_alloc();
  }
  ~FftBuffer() { fftw_free(data_); }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;

  fftw_complex* raw() { return data_; }
  cplx* begin() { return reinterpret_cast<cplx*>(data_); }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  fftw_complex* data_;
};

fftw_plan forward_plan(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, fftw_plan> plans;
  std::lock_guard lock(mutex);
  if (auto it = plans.find(n); it != plans.end()) return it->second;
  FftBuffer in(n), out(n);
  fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), in.raw(), out.raw(), FFTW_FORWARD, FFTW_ESTIMATE);
  if (!p) throw std::runtime_error("fftw: planning failed");
  plans.emplace(n, p);
  return p;
}

}  // namespace

std::vector<cplx> dft(std::span<const cplx> x) {
  if (x.empty()) throw std::invalid_argument("dft: empty input");
  const std::size_t n = x.size();
  FftBuffer in(n), out(n);
  std::copy(x.begin(), x.end(), in.begin());
  fftw_execute_dft(forward_plan(n), in.raw(), out.raw());
  return {out.begin(), out.begin() + n};
}

double window_prefactor(WindowNorm norm) {
  return norm == WindowNorm::UnitEnergy ? std::pow(std::numbers::pi, -0.25) : 1.0 / std::sqrt(std::numbers::pi);
}

double gaussian_window_value(double t, WindowNorm norm) { return window_prefactor(norm) * std::exp(-0.5 * t * t); }

double GaussianWindow::discrete_energy() const {
  double e = 0.0;
  for (double v : values) e += v * v;
  return e * dt;
}

GaussianWindow gaussian_window(const TimeGrid& time_grid, WindowNorm norm, double rel_cutoff) {
  time_grid.validate();
  if (!(rel_cutoff > 0.0 && rel_cutoff < 1.0)) throw std::invalid_argument("gaussian_window: cutoff must be in (0,1)");
  // exp(-t^2/2) >= rel_cutoff  <=>  |t| <= sqrt(-2 ln rel_cutoff)
  const double t_max = std::sqrt(-2.0 * std::log(rel_cutoff));
  GaussianWindow w;
  w.dt = time_grid.dt;
  w.norm = norm;
  w.half_width = static_cast<std::size_t>(std::floor(t_max / time_grid.dt));
  w.values.resize(2 * w.half_width + 1);
  for (std::size_t j = 0; j < w.values.size(); ++j) w.values[j] = gaussian_window_value(w.offset(j), norm);
  return w;
}

void TFGrid::validate() const {
  time_grid.validate();
  if (hop == 0) throw std::invalid_argument("TFGrid: hop must be >= 1");
  if (n_freq == 0 || n_freq > time_grid.n) throw std::invalid_argument("TFGrid: n_freq must be in [1, n]");
  if (!std::isfinite(omega_start)) throw std::invalid_argument("TFGrid: omega_start must be finite");
}

double TFGrid::domega() const { return 2.0 * std::numbers::pi / (static_cast<double>(time_grid.n) * time_grid.dt); }

TFGrid TFGrid::band(const TimeGrid& time_grid, double omega_min, double omega_max, std::size_t hop) {
  time_grid.validate();
  if (!(omega_max > omega_min)) throw std::invalid_argument("TFGrid::band: empty frequency band");
  TFGrid g{time_grid, hop, omega_min, 0};
  const double span = (omega_max - omega_min) / g.domega();
  g.n_freq = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  g.validate();
  return g;
}

TFGrid TFGrid::full(const TimeGrid& time_grid, std::size_t hop) {
  time_grid.validate();
  TFGrid g{time_grid, hop, 0.0, time_grid.n};
  g.omega_start = -static_cast<double>(time_grid.n / 2) * g.domega();
  g.validate();
  return g;
}

TFMatrix stft(const DiscreteSignal& s, const TFGrid& grid, const StftOptions& opts) {
  grid.validate();
  if (!(s.grid == grid.time_grid)) throw std::invalid_argument("stft: signal grid differs from TF grid");

  const std::size_t n = s.grid.n;
  const double dt = s.grid.dt;
  const double dw = grid.domega();
  const auto window = gaussian_window(s.grid, opts.norm, opts.window_cutoff);
  const std::size_t half = window.half_width;

  // Fold exp(-i omega_start t_j) dt into the input once; exp(-i l dw t_start)
  // is applied per output bin, leaving exp(-2 i pi l j / n) to the FFT.
  std::vector<cplx> modulated(n);
  for (std::size_t j = 0; j < n; ++j)
    modulated[j] = s.samples[j] * std::polar(dt, -grid.omega_start * s.grid.time(j));
  std::vector<cplx> out_phase(grid.n_freq);
  for (std::size_t l = 0; l < grid.n_freq; ++l)
    out_phase[l] = std::polar(1.0, -static_cast<double>(l) * dw * s.grid.t_start);

  TFMatrix result{grid, std::vector<cplx>(grid.n_time() * grid.n_freq)};
  const fftw_plan plan = forward_plan(n);
  const std::size_t rows = grid.n_time();
  const unsigned workers = std::max(1u, opts.workers);
  const std::size_t chunk = (rows + workers - 1) / workers;

  parallel_for(workers, workers, [&](std::size_t w) {
    FftBuffer in(n), out(n);
    const std::size_t k_begin = w * chunk;
    const std::size_t k_end = std::min(rows, k_begin + chunk);
    for (std::size_t k = k_begin; k < k_end; ++k) {
      const std::size_t center = k * grid.hop;
      std::fill(in.begin(), in.begin() + n, cplx{});
      const std::size_t j_lo = center >= half ? center - half : 0;
      const std::size_t j_hi = std::min(n - 1, center + half);
      for (std::size_t j = j_lo; j <= j_hi; ++j) in.begin()[j] = modulated[j] * window.values[j + half - center];
      fftw_execute_dft(plan, in.raw(), out.raw());
      cplx* row = result.values.data() + k * grid.n_freq;
      for (std::size_t l = 0; l < grid.n_freq; ++l) row[l] = out.begin()[l] * out_phase[l];
    }
  });
  return result;
}

Spectrogram spectrogram(const TFMatrix& v) {
  Spectrogram s{v.grid, std::vector<double>(v.values.size())};
  for (std::size_t i = 0; i < v.values.size(); ++i) s.values[i] = std::norm(v.values[i]);
  return s;
}

std::vector<bool> border_rows(const TFGrid& grid, WindowNorm norm, double max_outside_fraction) {
  grid.validate();
  if (!(max_outside_fraction > 0.0 && max_outside_fraction < 1.0))
    throw std::invalid_argument("border_rows: fraction must lie in (0, 1)");
  const auto window = gaussian_window(grid.time_grid, norm);
  const double total = window.discrete_energy();
  const auto n = static_cast<std::ptrdiff_t>(grid.time_grid.n);
  const auto half = static_cast<std::ptrdiff_t>(window.half_width);
  std::vector<bool> flags(grid.n_time());
  for (std::size_t k = 0; k < flags.size(); ++k) {
    const auto center = static_cast<std::ptrdiff_t>(k * grid.hop);
    double outside = 0.0;
    for (std::ptrdiff_t j = center - half; j <= center + half; ++j)
      if (j < 0 || j >= n) outside += window.values[j - center + half] * window.values[j - center + half];
    flags[k] = outside * window.dt > max_outside_fraction * total;
  }
  return flags;
}

cplx stft_at(const DiscreteSignal& s, double t, double omega, WindowNorm norm) {
  s.grid.validate();
  cplx acc = 0.0;
  for (std::size_t j = 0; j < s.grid.n; ++j) {
    const double tj = s.grid.time(j);
    const double g = gaussian_window_value(tj - t, norm);
    if (g == 0.0) continue;
    acc += s.samples[j] * g * std::polar(1.0, -omega * tj);
  }
  return acc * s.grid.dt;
}

double hermite_spectrogram_oracle(int k, double t, double omega) {
  if (k < 0) throw std::invalid_argument("hermite_spectrogram_oracle: order must be >= 0");
  const double r2 = t * t + omega * omega;
  if (r2 == 0.0) return k == 0 ? 1.0 : 0.0;
  const double log_value = k * std::log(r2) - k * std::numbers::ln2 - std::lgamma(k + 1.0) - 0.5 * r2;
  return std::exp(log_value);
}

cplx bargmann(const DiscreteSignal& s, cplx w) {
  s.grid.validate();
  // |integrand| ~ exp(-(t - sqrt2 Re w)^2 / 2) oscillating at sqrt2 Im w.
  const double centre = std::sqrt(2.0) * w.real();
  const double reach = 9.0;
  const double nyquist = std::numbers::pi / s.grid.dt;
  if (centre - reach < s.grid.t_start || centre + reach > s.grid.t_end() ||
      std::sqrt(2.0) * std::abs(w.imag()) >= 0.5 * nyquist)
    throw std::domain_error("bargmann: point outside the region resolvable from the signal grid");
  // pi^{-1/4} e^{-w^2/2} int s(t) e^{sqrt2 t w - t^2/2} dt, with the Gaussian
  // peak factored out so nothing overflows.
  const double peak = 0.5 * centre * centre;
  cplx acc = 0.0;
  for (std::size_t j = 0; j < s.grid.n; ++j) {
    const double t = s.grid.time(j);
    const double d = t - centre;
    if (std::abs(d) > reach + 1.0) continue;
    acc += s.samples[j] * std::exp(cplx(-0.5 * d * d, std::sqrt(2.0) * t * w.imag()));
  }
  return std::pow(std::numbers::pi, -0.25) * acc * s.grid.dt * std::exp(peak - 0.5 * w * w);
}

}  // namespace tfz
