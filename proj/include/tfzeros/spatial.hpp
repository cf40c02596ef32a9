#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tfzeros/pattern.hpp"

namespace tfz {

enum class SummaryKind { K, L, F, Pcf };

const char* to_string(SummaryKind kind);

/// A summary function sampled on an increasing distance grid.
struct SummaryCurve {
  std::vector<double> r;
  std::vector<double> values;
  SummaryKind kind = SummaryKind::K;
  std::string estimator;
  std::string correction;

  void validate() const;
};

/// n equally spaced distances from r_min to r_max inclusive.
std::vector<double> linear_r_grid(double r_min, double r_max, std::size_t n);
/// 64 points from 0 to a quarter of the shorter window side.
std::vector<double> default_r_grid(const Window& w);

/// Translation-corrected Ripley K and L = sqrt(K / pi):
///   K(r) = |W|^2 / (n (n - 1)) * sum_{i != j} 1(|z_i - z_j| < r) / |W cap W_{z_i - z_j}|.
/// Requires >= 2 points and max r < half the shorter window side.
std::pair<SummaryCurve, SummaryCurve> estimate_K_L(const PointPattern& p, std::span<const double> r_values);

/// Empty-space function from a regular query lattice. Only query points at
/// least max(r) away from the boundary contribute, so every level uses the
/// same fully observed set and the estimate is a proper distribution function.
SummaryCurve estimate_F(const PointPattern& p, std::span<const double> r_values, double query_spacing);
/// Query spacing sqrt(|W|) / 100.
double default_query_spacing(const Window& w);

/// Epanechnikov-smoothed, translation-corrected pair correlation:
///   g(r) = |W|^2 / (n (n - 1)) * sum_{i != j} k_h(r - d_ij) / (2 pi r |W cap W_{z_i - z_j}|).
/// g(0) is reported as 0.
SummaryCurve estimate_pcf(const PointPattern& p, std::span<const double> r_values, double bandwidth);
/// 0.15 / sqrt(lambda_hat).
double default_pcf_bandwidth(const PointPattern& p);

/// Average of per-pattern pcf estimates.
SummaryCurve estimate_pcf_pooled(std::span<const PointPattern> patterns, std::span<const double> r_values,
                                 double bandwidth);

struct CountMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
};

/// Counts in the disk of radius r about each window's centre. Requires at
/// least 30 patterns whose windows contain that disk.
CountMoments count_variance(std::span<const PointPattern> patterns, double r);

}  // namespace tfz
