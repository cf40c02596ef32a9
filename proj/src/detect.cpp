#include "tfzeros/detect.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "tfzeros/gaf.hpp"
#include "tfzeros/parallel.hpp"
#include "tfzeros/stft.hpp"

namespace tfz {
namespace {

void require_same_grid(const SummaryCurve& a, const SummaryCurve& b) {
  if (a.r.size() != b.r.size() || a.values.size() != a.r.size() || b.values.size() != b.r.size())
    throw std::invalid_argument("summary curves: grid mismatch");
  for (std::size_t i = 0; i < a.r.size(); ++i)
    if (std::abs(a.r[i] - b.r[i]) > 1e-12 * std::max(1.0, std::abs(a.r[i])))
      throw std::invalid_argument("summary curves: grid mismatch");
}

void validate_test_shape(double alpha, std::size_t m, std::size_t k) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("test: alpha must lie in (0, 1)");
  if (m == 0 || k == 0 || k > m) throw std::invalid_argument("test: need 1 <= k <= m");
  const double implied = static_cast<double>(k) / static_cast<double>(m + 1);
  if (std::abs(implied - alpha) > 1e-12) throw std::invalid_argument("test: alpha must equal k / (m + 1)");
}

void validate_variant(SummaryKind summary, double r_min, double r_max) {
  if (summary != SummaryKind::L && summary != SummaryKind::F)
    throw std::invalid_argument("test: summary must be L or F");
  if (!(r_min >= 0.0) || !(r_max > r_min)) throw std::invalid_argument("test: need 0 <= r_min < r_max");
}

DiscreteSignal simulate_noise(const TimeGrid& grid, const TestConfig& cfg, SeededStream stream) {
  if (cfg.noise == NoiseModel::HermiteTruncated) return sample_truncated_white_noise(cfg.hermite_terms, grid, stream);
  return sample_discrete_white_noise(grid, stream);
}

// Everything one variant needs from one pattern.
SummaryCurve curve_for(const PointPattern& p, const TestVariant& v, double r_min, const PipelineConfig& pipeline) {
  const auto r = linear_r_grid(r_min, v.r_max, pipeline.n_r);
  return summary_curve(p, v.summary, r, pipeline);
}

TestReport rank_and_decide(double observed, std::vector<double> noise, const TestConfig& cfg, const TestVariant& v) {
  TestReport rep;
  std::sort(noise.begin(), noise.end(), std::greater<>());
  rep.observed_statistic = observed;
  rep.sorted_noise_statistics = std::move(noise);
  rep.threshold = rep.sorted_noise_statistics[cfg.k - 1];
  rep.reject = observed >= rep.threshold;
  rep.alpha = cfg.alpha;
  rep.m = cfg.m;
  rep.k = cfg.k;
  rep.statistic = v.statistic;
  rep.summary = v.summary;
  rep.r_min = cfg.r_min;
  rep.r_max = v.r_max;
  rep.seed = cfg.seed;
  return rep;
}

}  // namespace

const char* to_string(Statistic s) { return s == Statistic::SInf ? "S_inf" : "S_2"; }

void PipelineConfig::validate() const {
  if (!(omega_max > omega_min)) throw std::invalid_argument("pipeline: omega_max must exceed omega_min");
  if (hop == 0) throw std::invalid_argument("pipeline: hop must be >= 1");
  if (!(f_query_spacing > 0.0)) throw std::invalid_argument("pipeline: F query spacing must be positive");
  if (n_r < 2) throw std::invalid_argument("pipeline: need at least 2 r values");
  zeros.validate();
}

void TestConfig::validate() const {
  validate_test_shape(alpha, m, k);
  validate_variant(summary, r_min, r_max);
  if (reference == ReferenceMode::Theory && summary != SummaryKind::L)
    throw std::invalid_argument("test: the theoretical reference exists for L only");
  if (noise == NoiseModel::HermiteTruncated && (hermite_terms < 0 || hermite_terms > kHermiteMaxOrder))
    throw std::invalid_argument("test: hermite_terms out of range");
  pipeline.validate();
}

double summary_statistic(const SummaryCurve& est, const SummaryCurve& ref, Statistic kind) {
  require_same_grid(est, ref);
  if (est.r.empty()) throw std::invalid_argument("summary_statistic: empty curves");
  if (kind == Statistic::SInf) {
    double s = 0.0;
    for (std::size_t i = 0; i < est.values.size(); ++i) s = std::max(s, std::abs(est.values[i] - ref.values[i]));
    return s;
  }
  double integral = 0.0;
  for (std::size_t i = 1; i < est.r.size(); ++i) {
    const double a = std::abs(est.values[i - 1] - ref.values[i - 1]);
    const double b = std::abs(est.values[i] - ref.values[i]);
    integral += 0.5 * (a + b) * (est.r[i] - est.r[i - 1]);
  }
  return std::sqrt(integral);
}

SummaryCurve reference_curve(std::span<const SummaryCurve> noise_curves, const SummaryCurve& observed) {
  if (noise_curves.empty()) throw std::invalid_argument("reference_curve: need at least one noise curve");
  SummaryCurve ref = observed;
  for (const auto& c : noise_curves) {
    require_same_grid(c, observed);
    for (std::size_t i = 0; i < c.values.size(); ++i) ref.values[i] += c.values[i];
  }
  const double count = static_cast<double>(noise_curves.size() + 1);
  for (auto& v : ref.values) v /= count;
  ref.estimator = "reference-mean";
  return ref;
}

SummaryCurve theoretical_L(std::span<const double> r_values) {
  SummaryCurve L{{r_values.begin(), r_values.end()}, std::vector<double>(r_values.size(), 0.0), SummaryKind::L,
                 "theory", "none"};
  L.validate();
  L.values.clear();
  auto integrand = [](double s) { return 2.0 * std::numbers::pi * s * pair_correlation_planar(s, 0.5); };
  double k = 0.0;
  double prev = 0.0;
  for (double r : r_values) {
    if (r > prev) k += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, prev, r, 10, 1e-13);
    prev = r;
    L.values.push_back(std::sqrt(k / std::numbers::pi));
  }
  return L;
}

PointPattern zeros_of_signal(const DiscreteSignal& y, const PipelineConfig& pipeline) {
  const auto grid = TFGrid::band(y.grid, pipeline.omega_min, pipeline.omega_max, pipeline.hop);
  const auto spec = spectrogram(stft(y, grid));
  return extract_zeros_mgn(spec, pipeline.zeros);
}

SummaryCurve summary_curve(const PointPattern& p, SummaryKind kind, std::span<const double> r_values,
                           const PipelineConfig& pipeline) {
  switch (kind) {
    case SummaryKind::K: return estimate_K_L(p, r_values).first;
    case SummaryKind::L: return estimate_K_L(p, r_values).second;
    case SummaryKind::F: return estimate_F(p, r_values, pipeline.f_query_spacing);
    case SummaryKind::Pcf: return estimate_pcf(p, r_values, default_pcf_bandwidth(p));
  }
  throw std::invalid_argument("summary_curve: unknown kind");
}

std::vector<TestReport> envelope_test_variants(const DiscreteSignal& y, const TestConfig& cfg,
                                               std::span<const TestVariant> variants) {
  validate_test_shape(cfg.alpha, cfg.m, cfg.k);
  cfg.pipeline.validate();
  if (variants.empty()) throw std::invalid_argument("envelope_test: no variants");
  for (const auto& v : variants) {
    validate_variant(v.summary, cfg.r_min, v.r_max);
    if (cfg.reference == ReferenceMode::Theory && v.summary != SummaryKind::L)
      throw std::invalid_argument("test: the theoretical reference exists for L only");
  }

  // Slot m holds the observed signal; slots 0..m-1 the noise replicates.
  const std::size_t n_variants = variants.size();
  std::vector<std::vector<SummaryCurve>> curves(cfg.m + 1, std::vector<SummaryCurve>(n_variants));
  parallel_for(cfg.m + 1, cfg.workers, [&](std::size_t j) {
    const PointPattern p = j == cfg.m ? zeros_of_signal(y, cfg.pipeline)
                                      : zeros_of_signal(simulate_noise(y.grid, cfg, derive(cfg.seed, j)), cfg.pipeline);
    for (std::size_t v = 0; v < n_variants; ++v) curves[j][v] = curve_for(p, variants[v], cfg.r_min, cfg.pipeline);
  });

  std::vector<TestReport> reports;
  reports.reserve(n_variants);
  for (std::size_t v = 0; v < n_variants; ++v) {
    std::vector<SummaryCurve> noise_curves;
    noise_curves.reserve(cfg.m);
    for (std::size_t j = 0; j < cfg.m; ++j) noise_curves.push_back(std::move(curves[j][v]));
    const SummaryCurve& observed = curves[cfg.m][v];
    const SummaryCurve ref =
        cfg.reference == ReferenceMode::Theory ? theoretical_L(observed.r) : reference_curve(noise_curves, observed);

    std::vector<double> noise_stats(cfg.m);
    for (std::size_t j = 0; j < cfg.m; ++j)
      noise_stats[j] = summary_statistic(noise_curves[j], ref, variants[v].statistic);
    const double obs = summary_statistic(observed, ref, variants[v].statistic);
    reports.push_back(rank_and_decide(obs, std::move(noise_stats), cfg, variants[v]));
  }
  return reports;
}

TestReport envelope_test(const DiscreteSignal& y, const TestConfig& cfg) {
  cfg.validate();
  const TestVariant v{cfg.summary, cfg.statistic, cfg.r_max};
  return envelope_test_variants(y, cfg, std::span(&v, 1)).front();
}

ConfidenceInterval clopper_pearson(std::size_t successes, std::size_t trials, double level) {
  if (trials == 0 || successes > trials) throw std::invalid_argument("clopper_pearson: need 0 <= x <= n, n > 0");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("clopper_pearson: level must lie in (0, 1)");
  const double tail = 0.5 * (1.0 - level);
  const auto x = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  ConfidenceInterval ci;
  ci.low = successes == 0 ? 0.0 : boost::math::quantile(boost::math::beta_distribution<>(x, n - x + 1.0), tail);
  ci.high = successes == trials ? 1.0 : boost::math::quantile(boost::math::beta_distribution<>(x + 1.0, n - x), 1.0 - tail);
  return ci;
}

void PowerConfig::validate() const {
  validate_test_shape(alpha, m, k);
  if (snr_list.empty() || support_fractions.empty() || r_max_list.empty() || summaries.empty())
    throw std::invalid_argument("power: empty parameter list");
  for (double s : snr_list)
    if (!(s >= 0.0)) throw std::invalid_argument("power: snr must be >= 0");
  for (double f : support_fractions)
    if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument("power: support fraction must lie in (0, 1]");
  for (double r : r_max_list)
    if (!(r > 0.0)) throw std::invalid_argument("power: r_max must be positive");
  for (auto s : summaries) validate_variant(s, 0.0, 1.0);
  if (n_repeats == 0) throw std::invalid_argument("power: n_repeats must be >= 1");
  if (!(half_span > 0.0) || n_samples < 16) throw std::invalid_argument("power: invalid time grid");
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw std::invalid_argument("power: ci_level must lie in (0, 1)");
  pipeline.validate();
}

namespace {

nlohmann::json panel_key(const PowerConfig& cfg, double snr, double support) {
  nlohmann::json variants = nlohmann::json::array();
  for (auto s : cfg.summaries)
    for (double r : cfg.r_max_list) variants.push_back({to_string(s), r});
  return {{"snr", snr},
          {"support_fraction", support},
          {"statistic", to_string(cfg.statistic)},
          {"variants", variants},
          {"n_repeats", cfg.n_repeats},
          {"n_samples", cfg.n_samples},
          {"half_span", cfg.half_span},
          {"omega1", cfg.omega1},
          {"omega2", cfg.omega2},
          {"m", cfg.m},
          {"k", cfg.k},
          {"seed", {cfg.seed.seed, cfg.seed.stream_id}},
          {"omega_min", cfg.pipeline.omega_min},
          {"omega_max", cfg.pipeline.omega_max},
          {"hop", cfg.pipeline.hop},
          {"margin", cfg.pipeline.zeros.margin},
          {"threshold_mode", cfg.pipeline.zeros.threshold_mode == ThresholdMode::None ? "none" : "relative"},
          {"epsilon", cfg.pipeline.zeros.epsilon},
          {"f_query_spacing", cfg.pipeline.f_query_spacing},
          {"n_r", cfg.pipeline.n_r}};
}

std::filesystem::path panel_file(const std::filesystem::path& dir, std::size_t si, std::size_t fi) {
  std::ostringstream name;
  name << "panel_snr" << si << "_support" << fi << ".json";
  return dir / name.str();
}

// Rejection counts for one (snr, support) panel, one per variant.
std::vector<std::size_t> run_panel(const PowerConfig& cfg, std::size_t si, std::size_t fi,
                                   std::span<const TestVariant> variants) {
  const TimeGrid grid = TimeGrid::centered(cfg.half_span, cfg.n_samples);
  const ChirpParams chirp{cfg.omega1, cfg.omega2, cfg.support_fractions[fi] * cfg.half_span, Envelope::TukeyBump};
  const DiscreteSignal s = normalize_energy(gen_chirp(chirp, grid));

  TestConfig tc;
  tc.alpha = cfg.alpha;
  tc.m = cfg.m;
  tc.k = cfg.k;
  tc.pipeline = cfg.pipeline;
  tc.workers = cfg.workers;

  // Common random numbers: repetition `rep` sees the same noise in every
  // panel, so panels differ only through the chirp.
  std::vector<std::size_t> rejections(variants.size(), 0);
  for (std::size_t rep = 0; rep < cfg.n_repeats; ++rep) {
    const SeededStream base = derive(cfg.seed, rep);
    const DiscreteSignal y = mix(s, sample_discrete_white_noise(grid, derive(base, 0)), cfg.snr_list[si]);
    tc.seed = derive(base, 1);
    const auto reports = envelope_test_variants(y, tc, variants);
    for (std::size_t v = 0; v < reports.size(); ++v) rejections[v] += reports[v].reject ? 1 : 0;
  }
  return rejections;
}

}  // namespace

std::vector<PowerCell> power_experiment(const PowerConfig& cfg, const std::optional<std::filesystem::path>& cache_dir) {
  cfg.validate();
  std::vector<TestVariant> variants;
  for (auto s : cfg.summaries)
    for (double r : cfg.r_max_list) variants.push_back({s, cfg.statistic, r});

  // Bonferroni split of the family level across the tests of one panel.
  const double per_test_level = 1.0 - (1.0 - cfg.ci_level) / static_cast<double>(variants.size());
  if (cache_dir) std::filesystem::create_directories(*cache_dir);

  std::vector<PowerCell> cells;
  for (std::size_t si = 0; si < cfg.snr_list.size(); ++si) {
    for (std::size_t fi = 0; fi < cfg.support_fractions.size(); ++fi) {
      const auto key = panel_key(cfg, cfg.snr_list[si], cfg.support_fractions[fi]);
      std::optional<std::vector<std::size_t>> counts;
      if (cache_dir) {
        std::ifstream in(panel_file(*cache_dir, si, fi));
        if (in) {
          const auto cached = nlohmann::json::parse(in, nullptr, false);
          if (!cached.is_discarded() && cached.value("key", nlohmann::json()) == key)
            counts = cached.at("rejections").get<std::vector<std::size_t>>();
        }
      }
      if (!counts) {
        counts = run_panel(cfg, si, fi, variants);
        if (cache_dir) {
          const auto path = panel_file(*cache_dir, si, fi);
          const auto tmp = std::filesystem::path(path).concat(".tmp");
          {
            std::ofstream out(tmp);
            out << nlohmann::json{{"key", key}, {"rejections", *counts}}.dump(2) << '\n';
          }
          std::filesystem::rename(tmp, path);
        }
      }
      for (std::size_t v = 0; v < variants.size(); ++v) {
        PowerCell c;
        c.snr = cfg.snr_list[si];
        c.support_fraction = cfg.support_fractions[fi];
        c.summary = variants[v].summary;
        c.r_max = variants[v].r_max;
        c.rejections = (*counts)[v];
        c.repeats = cfg.n_repeats;
        c.power = static_cast<double>(c.rejections) / static_cast<double>(c.repeats);
        const auto ci = clopper_pearson(c.rejections, c.repeats, per_test_level);
        c.ci_low = ci.low;
        c.ci_high = ci.high;
        cells.push_back(c);
      }
    }
  }
  return cells;
}

}  // namespace tfz
