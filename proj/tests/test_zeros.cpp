#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>
#include <vector>

#include "tfzeros/signal.hpp"
#include "tfzeros/stft.hpp"
#include "tfzeros/zeros.hpp"

using namespace tfz;

namespace {

// Spectrogram-shaped field |prod (z - a_j)|^2 exp(-|z|^2 / 2) on a TF lattice;
// its zeros are exactly the a_j.
Spectrogram analytic_field(const TFGrid& grid, const std::vector<cplx>& roots) {
  Spectrogram s{grid, std::vector<double>(grid.n_time() * grid.n_freq)};
  for (std::size_t k = 0; k < grid.n_time(); ++k) {
    for (std::size_t l = 0; l < grid.n_freq; ++l) {
      const cplx z{grid.omega(l), grid.time(k)};
      cplx p = 1.0;
      for (const auto& a : roots) p *= z - a;
      s.values[k * grid.n_freq + l] = std::norm(p) * std::exp(-0.5 * std::norm(z));
    }
  }
  return s;
}

Spectrogram oracle_field(const TFGrid& grid, int k) {
  Spectrogram s{grid, std::vector<double>(grid.n_time() * grid.n_freq)};
  for (std::size_t i = 0; i < grid.n_time(); ++i)
    for (std::size_t l = 0; l < grid.n_freq; ++l)
      s.values[i * grid.n_freq + l] = hermite_spectrogram_oracle(k, grid.time(i), grid.omega(l));
  return s;
}

// Square lattice with dt = domega ~ step starting at (-span, -span). The time
// axis runs well past +span (n dt = 2 pi / domega), so callers keep only
// points with |t| < span - 1; far out the field sits in the subnormal range
// where rounding manufactures minima.
TFGrid lattice(double span, double step) {
  const auto n = static_cast<std::size_t>(std::llround(2.0 * std::numbers::pi / (step * step)));
  return TFGrid::band(TimeGrid{-span, step, n}, -span, span);
}

std::vector<cplx> central(const PointPattern& p, double span) {
  std::vector<cplx> out;
  for (const auto& z : p.points)
    if (std::abs(z.imag()) < span - 1.0) out.push_back(z);
  return out;
}

}  // namespace

TEST_CASE("single strict minimum in a 5x5 field") {
  std::vector<double> v(25, 1.0);
  v[2 * 5 + 3] = 0.2;
  const auto m = strict_local_minima(v, 5, 5);
  REQUIRE(m.size() == 1);
  CHECK(m[0] == GridIndex{2, 3});
}

TEST_CASE("ties are not minima and borders are never minima") {
  std::vector<double> v(25, 1.0);
  v[2 * 5 + 2] = 0.5;
  v[2 * 5 + 3] = 0.5;
  CHECK(strict_local_minima(v, 5, 5).empty());
  std::vector<double> w(25, 1.0);
  w[0] = 0.0;
  w[4 * 5 + 2] = 0.0;
  CHECK(strict_local_minima(w, 5, 5).empty());
  CHECK_THROWS_AS(strict_local_minima(std::vector<double>(6, 0.0), 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(strict_local_minima(std::vector<double>(9, 0.0), 3, 4), std::invalid_argument);
}

TEST_CASE("shrink window") {
  const Window unit{0.0, 1.0, 0.0, 1.0};
  CHECK(shrink_window(unit, 0.0) == unit);
  const auto s = shrink_window(unit, 0.1);
  CHECK(s.x_min == doctest::Approx(0.1));
  CHECK(s.x_max == doctest::Approx(0.9));
  CHECK(s.y_min == doctest::Approx(0.1));
  CHECK(s.y_max == doctest::Approx(0.9));
  const Window r{0.0, 4.0, -1.0, 2.0};
  CHECK(shrink_window(r, 0.5).area() / r.area() == doctest::Approx((4.0 - 1.0) * (3.0 - 1.0) / 12.0));
  CHECK_THROWS_AS(shrink_window(unit, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(shrink_window(unit, -0.1), std::invalid_argument);
}

TEST_CASE("MGN on a known-root field returns the roots") {
  const std::vector<cplx> roots{{1.0, 1.0}, {-2.0, 0.5}, {0.5, -2.5}, {3.0, -1.0}};
  const auto grid = lattice(6.0, 0.02);
  ZeroExtractionConfig cfg;
  cfg.margin = 1.0;
  const auto p = central(extract_zeros_mgn(analytic_field(grid, roots), cfg), 6.0);
  REQUIRE(p.size() == roots.size());
  for (const auto& a : roots) {
    const bool found = std::any_of(p.begin(), p.end(), [&](cplx z) { return std::abs(z - a) < 0.03; });
    CHECK(found);
  }
}

TEST_CASE("MGN output matches strict minima exactly and is scale invariant") {
  const auto g = TimeGrid::centered(32.0, 1024);
  const auto spec = spectrogram(stft(sample_discrete_white_noise(g, SeededStream{21, 0}), TFGrid::band(g, 0.0, 16.0)));
  const auto p = extract_zeros_mgn(spec);
  const auto minima = strict_local_minima(spec.values, spec.rows(), spec.cols());
  std::set<std::pair<double, double>> expected;
  for (const auto& m : minima) {
    const cplx z{spec.grid.omega(m.col), spec.grid.time(m.row)};
    if (p.window.strictly_contains(z)) expected.insert({z.real(), z.imag()});
  }
  std::set<std::pair<double, double>> got;
  for (const auto& z : p.points) got.insert({z.real(), z.imag()});
  CHECK(got == expected);
  CHECK(got.size() == p.size());
  p.validate();
  for (const auto& z : p.points) CHECK(p.window.strictly_contains(z));

  for (double c : {1e-6, 3.0, 1e8}) {
    Spectrogram scaled = spec;
    for (auto& v : scaled.values) v *= c;
    CHECK(extract_zeros_mgn(scaled).points == p.points);
    ZeroExtractionConfig rel;
    rel.threshold_mode = ThresholdMode::Relative;
    rel.epsilon = 1e-3;
    CHECK(extract_zeros_mgn(scaled, rel).points == extract_zeros_mgn(spec, rel).points);
  }
}

TEST_CASE("relative threshold keeps only deep minima") {
  const auto g = TimeGrid::centered(32.0, 1024);
  const auto spec = spectrogram(stft(sample_discrete_white_noise(g, SeededStream{22, 0}), TFGrid::band(g, 0.0, 16.0)));
  ZeroExtractionConfig rel;
  rel.threshold_mode = ThresholdMode::Relative;
  rel.epsilon = 1e-3;
  const auto all = extract_zeros_mgn(spec);
  const auto deep = extract_zeros_mgn(spec, rel);
  CHECK(deep.size() <= all.size());
  CHECK(deep.size() > 0);
  rel.epsilon = 0.0;
  CHECK_THROWS_AS(extract_zeros_mgn(spec, rel), std::invalid_argument);
}

TEST_CASE("margin bounds the window") {
  const auto g = TimeGrid::centered(8.0, 256);
  const auto grid = TFGrid::band(g, 0.0, 4.0);
  const auto spec = spectrogram(stft(sample_discrete_white_noise(g, SeededStream{}), grid));
  ZeroExtractionConfig cfg;
  cfg.margin = 2.5;
  CHECK_THROWS_AS(extract_zeros_mgn(spec, cfg), std::invalid_argument);
  cfg.margin = 1.0;
  const auto p = extract_zeros_mgn(spec, cfg);
  CHECK(p.window.x_min == doctest::Approx(1.0));
  CHECK(p.window.y_min == doctest::Approx(g.t_start + 1.0));
}

TEST_CASE("refining the lattice never loses zeros") {
  const std::vector<std::vector<cplx>> cases{
      {{1.0, 1.0}, {-2.0, 0.5}, {0.5, -2.5}},
      {{0.0, 0.0}, {0.6, 0.0}, {-1.5, 1.5}, {2.5, -2.0}},
      {{0.3, 0.4}, {0.3, -0.5}, {-0.8, 0.0}},
  };
  ZeroExtractionConfig cfg;
  cfg.margin = 1.0;
  for (const auto& roots : cases) {
    std::size_t previous = 0;
    for (double step : {0.4, 0.2, 0.1, 0.05, 0.025}) {
      const auto grid = lattice(5.0, step);
      const auto count = central(extract_zeros_mgn(analytic_field(grid, roots), cfg), 5.0).size();
      CHECK(count >= previous);
      previous = count;
    }
    CHECK(previous == roots.size());
  }
  // The Hermite spectrogram vanishes only at the origin.
  for (int k : {1, 4, 10}) {
    std::size_t previous = 0;
    for (double step : {0.4, 0.2, 0.1}) {
      const auto grid = lattice(4.0, step);
      const auto count = central(extract_zeros_mgn(oracle_field(grid, k), cfg), 4.0).size();
      CHECK(count >= previous);
      previous = count;
    }
    CHECK(previous == 1);
  }
}

TEST_CASE("white-noise zero intensity is 1/(2 pi)") {
  const auto g = TimeGrid::centered(64.0, 1024);
  double points = 0.0, area = 0.0;
  for (std::uint64_t r = 0; r < 20; ++r) {
    const auto p =
        extract_zeros_mgn(spectrogram(stft(sample_discrete_white_noise(g, SeededStream{31, r}), TFGrid::band(g, 0.0, 16.0))));
    points += static_cast<double>(p.size());
    area += p.window.area();
  }
  CHECK(points / area == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(0.05));
}
