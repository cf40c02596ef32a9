#include "doctest.h"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include "tfzeros/detect.hpp"
#include "tfzeros/gaf.hpp"

using namespace tfz;

namespace {

SummaryCurve curve(std::vector<double> r, std::vector<double> v) {
  return SummaryCurve{std::move(r), std::move(v), SummaryKind::L, "test", "none"};
}

// P(X >= x) for X ~ Binomial(n, p), summed directly.
double upper_tail(std::size_t x, std::size_t n, double p) {
  double total = 0.0;
  for (std::size_t j = x; j <= n; ++j) {
    const double lc = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
    total += std::exp(lc + j * std::log(p) + (n - j) * std::log1p(-p));
  }
  return total;
}

template <class F>
double bisect(F f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

TestConfig small_test(std::uint64_t seed) {
  TestConfig cfg;
  cfg.m = 19;
  cfg.k = 1;
  cfg.alpha = 0.05;
  cfg.seed = SeededStream{seed, 0};
  return cfg;
}

const TimeGrid kGrid = TimeGrid::centered(64.0, 1024);

}  // namespace

TEST_CASE("summary statistics") {
  const auto r = linear_r_grid(0.0, 2.0, 21);
  std::vector<double> ramp, zero(r.size(), 0.0), half(r.size(), 0.5);
  for (double x : r) ramp.push_back(x);
  CHECK(summary_statistic(curve(r, ramp), curve(r, zero), Statistic::SInf) == doctest::Approx(2.0));
  CHECK(summary_statistic(curve(r, ramp), curve(r, zero), Statistic::S2) == doctest::Approx(std::sqrt(2.0)));
  CHECK(summary_statistic(curve(r, half), curve(r, zero), Statistic::S2) == doctest::Approx(1.0));
  CHECK(summary_statistic(curve(r, zero), curve(r, half), Statistic::SInf) == doctest::Approx(0.5));
  CHECK(summary_statistic(curve(r, half), curve(r, half), Statistic::S2) == 0.0);

  Rng rng(SeededStream{21, 0});
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < r.size(); ++i) a.push_back(rng.normal()), b.push_back(rng.normal());
    const double s2 = summary_statistic(curve(r, a), curve(r, b), Statistic::S2);
    const double sinf = summary_statistic(curve(r, a), curve(r, b), Statistic::SInf);
    CHECK(sinf >= s2 * s2 / 2.0 - 1e-12);
  }
  CHECK_THROWS_AS(summary_statistic(curve(r, ramp), curve(linear_r_grid(0.0, 1.0, 21), ramp), Statistic::S2),
                  std::invalid_argument);
}

TEST_CASE("reference curve") {
  const std::vector<double> r{0.0, 1.0, 2.0};
  const std::vector<SummaryCurve> noise{curve(r, {1, 2, 3}), curve(r, {3, 2, 1})};
  const auto ref = reference_curve(noise, curve(r, {2, 5, 2}));
  CHECK(ref.values == std::vector<double>{2.0, 3.0, 2.0});

  // Shifting every curve shifts the reference by the same amount.
  const std::vector<SummaryCurve> shifted{curve(r, {1.5, 2.5, 3.5}), curve(r, {3.5, 2.5, 1.5})};
  const auto ref2 = reference_curve(shifted, curve(r, {2.5, 5.5, 2.5}));
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(ref2.values[i] == doctest::Approx(ref.values[i] + 0.5));
  CHECK_THROWS_AS(reference_curve(std::vector<SummaryCurve>{}, noise[0]), std::invalid_argument);
}

TEST_CASE("test configuration checks") {
  CHECK_NOTHROW(TestConfig{}.validate());
  auto bad = [](auto mutate) {
    TestConfig c;
    mutate(c);
    return c;
  };
  CHECK_THROWS_AS(bad([](TestConfig& c) { c.k = 9; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](TestConfig& c) { c.k = 0, c.alpha = 0.0; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](TestConfig& c) { c.m = 9, c.k = 10, c.alpha = 1.0; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](TestConfig& c) { c.summary = SummaryKind::K; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](TestConfig& c) { c.reference = ReferenceMode::Theory; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](TestConfig& c) { c.r_max = 0.0; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](TestConfig& c) { c.pipeline.hop = 0; }).validate(), std::invalid_argument);
  CHECK_NOTHROW(bad([](TestConfig& c) { c.summary = SummaryKind::L, c.reference = ReferenceMode::Theory; }).validate());
  CHECK_NOTHROW(bad([](TestConfig& c) { c.m = 39, c.k = 2; }).validate());

  PowerConfig p;
  CHECK_NOTHROW(p.validate());
  p.support_fractions = {1.5};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("Clopper-Pearson interval") {
  for (std::size_t n : {10u, 57u, 400u}) {
    for (std::size_t x : {std::size_t{0}, std::size_t{1}, n / 3, n - 1, n}) {
      const double level = 0.95, tail = 0.025;
      const auto ci = clopper_pearson(x, n, level);
      if (x == 0) {
        CHECK(ci.low == 0.0);
        CHECK(ci.high == doctest::Approx(1.0 - std::pow(tail, 1.0 / n)).epsilon(1e-10));
      } else {
        const double lo = bisect([&](double p) { return upper_tail(x, n, p) >= tail; }, 0.0, 1.0);
        CHECK(ci.low == doctest::Approx(lo).epsilon(1e-8));
      }
      if (x == n) {
        CHECK(ci.high == 1.0);
        CHECK(ci.low == doctest::Approx(std::pow(tail, 1.0 / n)).epsilon(1e-10));
      } else {
        const double hi = bisect([&](double p) { return 1.0 - upper_tail(x + 1, n, p) <= tail; }, 0.0, 1.0);
        CHECK(ci.high == doctest::Approx(hi).epsilon(1e-8));
      }
      CHECK(ci.low <= static_cast<double>(x) / n);
      CHECK(ci.high >= static_cast<double>(x) / n);
    }
  }
  CHECK(clopper_pearson(20, 400, 0.99).low < clopper_pearson(20, 400, 0.95).low);
  CHECK_THROWS_AS(clopper_pearson(5, 4, 0.95), std::invalid_argument);
  CHECK_THROWS_AS(clopper_pearson(0, 0, 0.95), std::invalid_argument);
  CHECK_THROWS_AS(clopper_pearson(1, 4, 1.0), std::invalid_argument);
}

TEST_CASE("theoretical L") {
  const auto r = linear_r_grid(0.0, 8.0, 81);
  const auto L = theoretical_L(r);
  CHECK(L.values.front() == 0.0);
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(L.values[i] > L.values[i - 1]);

  // Trapezoid oracle on a fine grid.
  double k = 0.0, s_prev = 0.0, f_prev = 0.0;
  std::size_t next = 1;
  const double h = 1e-4;
  for (double s = h; next < r.size(); s += h) {
    const double f = 2.0 * std::numbers::pi * s * pair_correlation_planar(s, 0.5);
    k += 0.5 * (f + f_prev) * (s - s_prev);
    s_prev = s, f_prev = f;
    if (std::abs(s - r[next]) < 0.5 * h) {
      CHECK(L.values[next] == doctest::Approx(std::sqrt(k / std::numbers::pi)).epsilon(1e-7));
      ++next;
    }
  }
  // Number rigidity: K(r) approaches pi r^2 - 1/rho with rho = 1/(2 pi).
  CHECK(r.back() * r.back() - L.values.back() * L.values.back() == doctest::Approx(2.0).epsilon(1e-3));
  // Repulsion: L below r at short range.
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(L.values[i] < r[i]);
}

TEST_CASE("theoretical L matches simulated white-noise zeros") {
  const PipelineConfig pipe;
  const auto r = linear_r_grid(0.0, 2.0, 21);
  std::vector<double> mean(r.size(), 0.0);
  const int reps = 12;
  for (int s = 0; s < reps; ++s) {
    const auto p = zeros_of_signal(sample_discrete_white_noise(kGrid, SeededStream{22, static_cast<std::uint64_t>(s)}), pipe);
    const auto L = estimate_K_L(p, r).second;
    for (std::size_t i = 0; i < r.size(); ++i) mean[i] += L.values[i] / reps;
  }
  const auto theory = theoretical_L(r);
  for (std::size_t i = 5; i < r.size(); ++i) {
    INFO("r = " << r[i]);
    CHECK(mean[i] == doctest::Approx(theory.values[i]).epsilon(0.05));
  }
}

TEST_CASE("envelope test mechanics") {
  const auto y = sample_discrete_white_noise(kGrid, SeededStream{23, 0});
  auto cfg = small_test(5);
  const auto a = envelope_test(y, cfg);
  const auto b = envelope_test(y, cfg);
  CHECK(a.observed_statistic == b.observed_statistic);
  CHECK(a.sorted_noise_statistics == b.sorted_noise_statistics);
  CHECK(a.sorted_noise_statistics.size() == 19);
  CHECK(std::is_sorted(a.sorted_noise_statistics.rbegin(), a.sorted_noise_statistics.rend()));
  CHECK(a.threshold == a.sorted_noise_statistics[0]);
  CHECK(a.reject == (a.observed_statistic >= a.threshold));

  cfg.workers = 3;
  const auto c = envelope_test(y, cfg);
  CHECK(c.sorted_noise_statistics == a.sorted_noise_statistics);

  // Larger k lowers the threshold on the same simulations.
  TestConfig c2 = small_test(6), c4 = small_test(6);
  c2.m = c4.m = 39;
  c2.k = 2, c2.alpha = 0.05;
  c4.k = 4, c4.alpha = 0.1;
  const auto r2 = envelope_test(y, c2), r4 = envelope_test(y, c4);
  CHECK(r2.sorted_noise_statistics == r4.sorted_noise_statistics);
  CHECK(r4.threshold <= r2.threshold);
  CHECK((!r2.reject || r4.reject));

  // Shared simulations across variants reproduce the single tests.
  const std::vector<TestVariant> variants{{SummaryKind::F, Statistic::S2, 2.0}, {SummaryKind::L, Statistic::SInf, 1.5}};
  const auto multi = envelope_test_variants(y, small_test(5), variants);
  CHECK(multi[0].observed_statistic == a.observed_statistic);
  auto single = small_test(5);
  single.summary = SummaryKind::L, single.statistic = Statistic::SInf, single.r_max = 1.5;
  CHECK(multi[1].sorted_noise_statistics == envelope_test(y, single).sorted_noise_statistics);

  auto theory = small_test(5);
  theory.summary = SummaryKind::L, theory.reference = ReferenceMode::Theory;
  const auto t = envelope_test(y, theory);
  CHECK(t.sorted_noise_statistics.size() == 19);

  auto herm = small_test(5);
  herm.noise = NoiseModel::HermiteTruncated;
  herm.hermite_terms = 300;
  CHECK_NOTHROW(envelope_test(y, herm));
}

TEST_CASE("a strong chirp is detected") {
  const auto s = normalize_energy(gen_chirp(ChirpParams{6.0, 10.0, 64.0}, kGrid));
  const auto y = mix(s, sample_discrete_white_noise(kGrid, SeededStream{24, 0}), 10.0);
  const auto rep = envelope_test(y, small_test(7));
  CHECK(rep.reject);
  CHECK(rep.observed_statistic > rep.sorted_noise_statistics.front());
}

TEST_CASE("power experiment") {
  PowerConfig cfg;
  cfg.snr_list = {10.0};
  cfg.support_fractions = {1.0};
  cfg.r_max_list = {1.0, 2.0};
  cfg.summaries = {SummaryKind::F};
  cfg.n_repeats = 3;
  cfg.n_samples = 1024;
  cfg.m = 19;
  cfg.k = 1;
  cfg.seed = SeededStream{25, 0};

  const auto dir = std::filesystem::temp_directory_path() / "tfzeros_power_test";
  std::filesystem::remove_all(dir);

  const auto fresh = power_experiment(cfg);
  REQUIRE(fresh.size() == 2);
  const auto cached = power_experiment(cfg, dir);
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    CHECK(cached[i].rejections == fresh[i].rejections);
    CHECK(fresh[i].repeats == 3);
    CHECK(fresh[i].power == doctest::Approx(fresh[i].rejections / 3.0));
    // Bonferroni over the two tests of the panel.
    const auto ci = clopper_pearson(fresh[i].rejections, 3, 1.0 - 0.05 / 2.0);
    CHECK(fresh[i].ci_low == doctest::Approx(ci.low));
    CHECK(fresh[i].ci_high == doctest::Approx(ci.high));
  }
  CHECK(fresh[0].r_max == 1.0);
  CHECK(fresh[1].r_max == 2.0);

  // A matching cache entry is reused as is.
  const auto file = dir / "panel_snr0_support0.json";
  REQUIRE(std::filesystem::exists(file));
  nlohmann::json j;
  std::ifstream(file) >> j;
  j["rejections"] = {1, 2};
  std::ofstream(file) << j.dump();
  const auto resumed = power_experiment(cfg, dir);
  CHECK(resumed[0].rejections == 1);
  CHECK(resumed[1].rejections == 2);

  // A different configuration does not pick it up.
  cfg.n_repeats = 2;
  const auto rerun = power_experiment(cfg, dir);
  CHECK(rerun[0].repeats == 2);
  nlohmann::json j2;
  std::ifstream(file) >> j2;
  CHECK(j2["key"]["n_repeats"] == 2);
  std::filesystem::remove_all(dir);
}
