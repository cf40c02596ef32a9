#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "tfzeros/detect.hpp"
#include "tfzeros/gaf.hpp"
#include "tfzeros/signal.hpp"
#include "tfzeros/spatial.hpp"

using namespace tfz;

namespace {

double brute_K(const PointPattern& p, double r) {
  const double a = p.window.width(), b = p.window.height();
  const double n = static_cast<double>(p.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (i == j) continue;
      const auto v = p.points[i] - p.points[j];
      if (std::abs(v) < r) sum += 1.0 / ((a - std::abs(v.real())) * (b - std::abs(v.imag())));
    }
  return (a * b) * (a * b) / (n * (n - 1.0)) * sum;
}

PointPattern transformed(const PointPattern& p, cplx scale, cplx shift) {
  PointPattern q;
  for (const auto& z : p.points) q.points.push_back(scale * z + shift);
  const cplx c0 = scale * cplx(p.window.x_min, p.window.y_min) + shift;
  const cplx c1 = scale * cplx(p.window.x_max, p.window.y_max) + shift;
  q.window = {std::min(c0.real(), c1.real()), std::max(c0.real(), c1.real()), std::min(c0.imag(), c1.imag()),
              std::max(c0.imag(), c1.imag())};
  return q;
}

}  // namespace

TEST_CASE("K and L against a brute-force sum") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto p = sample_poisson(0.4, Window{0.0, 5.0, 0.0, 4.0}, SeededStream{11, s});
    if (p.size() > 10) p.points.resize(10);
    if (p.size() < 2) continue;
    const auto r = linear_r_grid(0.0, 1.9, 40);
    const auto [K, L] = estimate_K_L(p, r);
    CHECK(K.kind == SummaryKind::K);
    CHECK(L.kind == SummaryKind::L);
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double ref = brute_K(p, r[i]);
      CHECK(std::abs(K.values[i] - ref) <= 1e-12 * std::max(1.0, ref));
      CHECK(L.values[i] == doctest::Approx(std::sqrt(ref / std::numbers::pi)).epsilon(1e-12));
      if (i > 0) CHECK(K.values[i] >= K.values[i - 1]);
    }
    CHECK(K.values.front() == 0.0);
  }
}

TEST_CASE("summaries are invariant under translation and quarter turns") {
  const auto p = sample_poisson(1.0, Window{0.0, 8.0, 0.0, 6.0}, SeededStream{12, 0});
  const auto r = linear_r_grid(0.0, 2.5, 30);
  const auto [K, L] = estimate_K_L(p, r);

  for (cplx scale : {cplx(1.0, 0.0), cplx(0.0, 1.0), cplx(-1.0, 0.0)}) {
    const auto q = transformed(p, scale, cplx(-17.25, 3.5));
    const auto [Kq, Lq] = estimate_K_L(q, r);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(Kq.values[i] == doctest::Approx(K.values[i]).epsilon(1e-12));
  }

  // The query lattice is anchored at the window corner, so F is exactly
  // invariant under translations by whole query cells.
  const double dq = 0.25;
  const auto F = estimate_F(p, r, dq);
  const auto Fq = estimate_F(transformed(p, 1.0, cplx(8 * dq, -4 * dq)), r, dq);
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(Fq.values[i] == doctest::Approx(F.values[i]).epsilon(1e-12));
}

TEST_CASE("L scales with the pattern") {
  const auto p = sample_poisson(1.0, Window{-3.0, 3.0, -3.0, 3.0}, SeededStream{13, 0});
  const double c = 2.5;
  const auto r = linear_r_grid(0.0, 2.0, 25);
  std::vector<double> rc;
  for (double x : r) rc.push_back(c * x);
  const auto L = estimate_K_L(p, r).second;
  const auto Lc = estimate_K_L(transformed(p, c, 0.0), rc).second;
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(Lc.values[i] == doctest::Approx(c * L.values[i]).epsilon(1e-12));
}

TEST_CASE("empty-space function") {
  const auto p = sample_poisson(1.0, Window{0.0, 10.0, 0.0, 10.0}, SeededStream{14, 0});
  const auto r = linear_r_grid(0.0, 2.0, 41);
  const auto F = estimate_F(p, r, 0.05);
  CHECK(F.kind == SummaryKind::F);
  CHECK(F.values.front() == 0.0);
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(F.values[i] >= F.values[i - 1]);
  for (double v : F.values) CHECK((v >= 0.0 && v <= 1.0));
  // Poisson: F(r) = 1 - exp(-pi r^2) on average over realizations.
  std::vector<double> mean(r.size(), 0.0);
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto Fs = estimate_F(sample_poisson(1.0, p.window, SeededStream{14, s}), r, 0.05);
    for (std::size_t i = 0; i < r.size(); ++i) mean[i] += Fs.values[i] / 30.0;
  }
  for (std::size_t i = 0; i < r.size(); i += 5)
    CHECK(std::abs(mean[i] - (1.0 - std::exp(-std::numbers::pi * r[i] * r[i]))) < 0.03);

  // One point in the middle: F is the covered fraction of the eroded square.
  PointPattern one{{cplx(5.0, 5.0)}, Window{0.0, 10.0, 0.0, 10.0}};
  const std::vector<double> rr{0.0, 1.0, 2.0};
  const auto F1 = estimate_F(one, rr, 0.01);
  CHECK(F1.values[1] == doctest::Approx(std::numbers::pi / 36.0).epsilon(0.01));
  CHECK(F1.values[2] == doctest::Approx(4.0 * std::numbers::pi / 36.0).epsilon(0.01));
}

TEST_CASE("pair correlation estimates") {
  std::vector<PointPattern> patterns;
  for (std::uint64_t s = 0; s < 40; ++s) patterns.push_back(sample_poisson(1.0, Window{0.0, 15.0, 0.0, 15.0}, SeededStream{15, s}));
  const auto r = linear_r_grid(0.5, 3.0, 11);
  const auto g = estimate_pcf_pooled(patterns, r, 0.15);
  CHECK(g.kind == SummaryKind::Pcf);
  for (double v : g.values) CHECK(v == doctest::Approx(1.0).epsilon(0.12));

  // Two points at distance 1: mass only in a bandwidth around r = 1.
  const PointPattern two{{cplx(4.5, 5.0), cplx(5.5, 5.0)}, Window{0.0, 10.0, 0.0, 10.0}};
  const std::vector<double> rr{0.0, 0.5, 0.95, 1.0, 1.05, 1.5, 3.0};
  const auto g2 = estimate_pcf(two, rr, 0.1);
  CHECK(g2.values[0] == 0.0);
  CHECK(g2.values[1] == 0.0);
  CHECK(g2.values[5] == 0.0);
  CHECK(g2.values[6] == 0.0);
  CHECK(g2.values[3] > g2.values[2]);
  CHECK(g2.values[3] > g2.values[4]);
  // Epanechnikov kernel k_h(0) = 3/(4h), pair counted twice, overlap 9*10.
  const double peak = 100.0 * 100.0 / 2.0 * 2.0 * (0.75 / 0.1) / (2.0 * std::numbers::pi * 1.0 * 90.0);
  CHECK(g2.values[3] == doctest::Approx(peak).epsilon(1e-12));
  CHECK(default_pcf_bandwidth(two) == doctest::Approx(0.15 / std::sqrt(0.02)));
}

TEST_CASE("count variance") {
  std::vector<PointPattern> patterns;
  for (std::uint64_t s = 0; s < 200; ++s) patterns.push_back(sample_poisson(1.0, Window{-3.0, 3.0, -3.0, 3.0}, SeededStream{16, s}));
  const auto m = count_variance(patterns, 2.0);
  const double mu = 4.0 * std::numbers::pi;
  CHECK(std::abs(m.mean - mu) < 4.0 * std::sqrt(mu / 200.0));
  CHECK(std::abs(m.variance - mu) < 4.0 * std::sqrt((mu + 2.0 * mu * mu) / 200.0));

  CHECK_THROWS_AS(count_variance(std::span(patterns).first(29), 2.0), std::invalid_argument);
  CHECK_THROWS_AS(count_variance(patterns, 3.5), std::invalid_argument);
  CHECK_THROWS_AS(count_variance(patterns, 0.0), std::invalid_argument);
}

TEST_CASE("estimator argument checks") {
  const PointPattern p{{cplx(1.0, 1.0), cplx(2.0, 2.0), cplx(3.0, 1.5)}, Window{0.0, 4.0, 0.0, 4.0}};
  const std::vector<double> ok{0.0, 1.0};
  CHECK_NOTHROW(estimate_K_L(p, ok));
  CHECK_THROWS_AS(estimate_K_L(p, std::vector<double>{0.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(estimate_K_L(p, std::vector<double>{1.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(estimate_K_L(p, std::vector<double>{-0.1, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(estimate_K_L(p, std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(estimate_K_L(PointPattern{{cplx(1.0, 1.0)}, p.window}, ok), std::invalid_argument);
  CHECK_THROWS_AS(estimate_F(PointPattern{{}, p.window}, ok, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(estimate_F(p, ok, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(estimate_F(p, std::vector<double>{0.0, 2.0}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(estimate_pcf(p, ok, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(linear_r_grid(1.0, 1.0, 5), std::invalid_argument);
  const auto d = default_r_grid(Window{0.0, 8.0, 0.0, 4.0});
  CHECK(d.size() == 64);
  CHECK(d.back() == doctest::Approx(1.0));
  CHECK(default_query_spacing(Window{0.0, 8.0, 0.0, 2.0}) == doctest::Approx(0.04));
}

TEST_CASE("white-noise zeros repel and a chirp opens holes") {
  const auto grid = TimeGrid::centered(64.0, 4096);
  const PipelineConfig pipe;
  const auto noise = sample_discrete_white_noise(grid, SeededStream{17, 0});
  const auto pn = zeros_of_signal(noise, pipe);
  const auto r = linear_r_grid(0.0, 2.0, 41);
  const auto L = estimate_K_L(pn, r).second;
  for (std::size_t i = 1; i < r.size(); ++i)
    if (r[i] <= 1.5) CHECK(L.values[i] < r[i]);

  const auto chirp = normalize_energy(gen_chirp(ChirpParams{6.0, 10.0, 64.0}, grid));
  const auto y = mix(chirp, noise, 10.0);
  const auto py = zeros_of_signal(y, pipe);
  const auto Fn = estimate_F(pn, r, pipe.f_query_spacing);
  const auto Fy = estimate_F(py, r, pipe.f_query_spacing);
  // Compare at a distance where the noise F is clearly below 1.
  CHECK(Fy.values[20] < Fn.values[20]);
}
