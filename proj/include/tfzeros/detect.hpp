#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "tfzeros/pattern.hpp"
#include "tfzeros/random.hpp"
#include "tfzeros/signal.hpp"
#include "tfzeros/spatial.hpp"
#include "tfzeros/zeros.hpp"

namespace tfz {

enum class Statistic {
  SInf,  // sup_r |J(r) - J0(r)|
  S2,    // sqrt( int |J(r) - J0(r)| dr )
};

enum class ReferenceMode {
  Simulated,  // average of the m noise curves and the observed curve
  Theory,     // closed-form L of white-noise spectrogram zeros (L only)
};

enum class NoiseModel {
  Discrete,          // i.i.d. N_C(0,1) samples
  HermiteTruncated,  // truncated Hermite series
};

const char* to_string(Statistic s);

/// Signal -> spectrogram -> zeros -> summary curve.
struct PipelineConfig {
  double omega_min = 0.0;
  double omega_max = 16.0;
  std::size_t hop = 1;
  ZeroExtractionConfig zeros{};
  double f_query_spacing = 0.25;
  std::size_t n_r = 64;

  void validate() const;
};

struct TestConfig {
  double alpha = 0.05;
  std::size_t m = 199;
  std::size_t k = 10;
  Statistic statistic = Statistic::S2;
  SummaryKind summary = SummaryKind::F;
  double r_min = 0.0;
  double r_max = 2.0;
  SeededStream seed{};
  PipelineConfig pipeline{};
  ReferenceMode reference = ReferenceMode::Simulated;
  NoiseModel noise = NoiseModel::Discrete;
  int hermite_terms = 1024;  // HermiteTruncated only
  unsigned workers = 1;

  /// Throws std::invalid_argument unless alpha = k / (m + 1) with 1 <= k <= m,
  /// the summary is L or F, and the r range is valid.
  void validate() const;
};

struct TestReport {
  double observed_statistic = 0.0;
  std::vector<double> sorted_noise_statistics;  // descending
  double threshold = 0.0;                       // k-th largest noise statistic
  bool reject = false;
  double alpha = 0.0;
  std::size_t m = 0;
  std::size_t k = 0;
  Statistic statistic = Statistic::S2;
  SummaryKind summary = SummaryKind::F;
  double r_min = 0.0;
  double r_max = 0.0;
  /// Noise replicate j used derive(seed, j).
  SeededStream seed{};
};

double summary_statistic(const SummaryCurve& est, const SummaryCurve& ref, Statistic kind);

/// (sum_j J_noise_j + J_observed) / (m + 1).
SummaryCurve reference_curve(std::span<const SummaryCurve> noise_curves, const SummaryCurve& observed);

/// Closed-form L of the zeros of the Gaussian spectrogram of white noise,
/// from K(r) = int_0^r 2 pi s g(s) ds with the gamma = 1/2 pair correlation.
SummaryCurve theoretical_L(std::span<const double> r_values);

PointPattern zeros_of_signal(const DiscreteSignal& y, const PipelineConfig& pipeline);
SummaryCurve summary_curve(const PointPattern& p, SummaryKind kind, std::span<const double> r_values,
                           const PipelineConfig& pipeline);

/// Monte Carlo envelope test of H0: y is white noise.
TestReport envelope_test(const DiscreteSignal& y, const TestConfig& cfg);

struct TestVariant {
  SummaryKind summary = SummaryKind::F;
  Statistic statistic = Statistic::S2;
  double r_max = 2.0;
};

/// Runs several (summary, statistic, r_max) tests sharing one set of m noise
/// simulations and zero patterns; cfg.summary, cfg.statistic and cfg.r_max
/// are ignored in favour of each variant.
std::vector<TestReport> envelope_test_variants(const DiscreteSignal& y, const TestConfig& cfg,
                                               std::span<const TestVariant> variants);

struct ConfidenceInterval {
  double low = 0.0;
  double high = 1.0;
};

/// Exact binomial interval for `successes` out of `trials` at `level`.
ConfidenceInterval clopper_pearson(std::size_t successes, std::size_t trials, double level);

struct PowerConfig {
  std::vector<double> snr_list{1.0, 5.0, 10.0};
  std::vector<double> support_fractions{1.0, 0.5};
  std::vector<double> r_max_list{0.5, 1.0, 1.5, 2.0, 2.5};
  std::vector<SummaryKind> summaries{SummaryKind::L, SummaryKind::F};
  Statistic statistic = Statistic::S2;
  std::size_t n_repeats = 200;
  std::size_t n_samples = 4096;
  double half_span = 64.0;  // observation window [-T, T)
  double omega1 = 6.0;
  double omega2 = 10.0;
  double alpha = 0.05;
  std::size_t m = 199;
  std::size_t k = 10;
  double ci_level = 0.95;  // family level per panel, Bonferroni-split
  PipelineConfig pipeline{};
  SeededStream seed{};
  unsigned workers = 1;

  void validate() const;
};

struct PowerCell {
  double snr = 0.0;
  double support_fraction = 1.0;
  SummaryKind summary = SummaryKind::F;
  double r_max = 0.0;
  std::size_t rejections = 0;
  std::size_t repeats = 0;
  double power = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
};

/// Empirical power on noisy chirps for every (snr, support) panel and every
/// (summary, r_max) test inside it. With a cache directory, each panel is
/// stored as one JSON file and reused when its configuration matches.
std::vector<PowerCell> power_experiment(const PowerConfig& cfg,
                                        const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

}  // namespace tfz
