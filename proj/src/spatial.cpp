#include "tfzeros/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tfz {
namespace {

void validate_r_values(std::span<const double> r) {
  if (r.empty()) throw std::invalid_argument("summary: empty r grid");
  if (!(r.front() >= 0.0)) throw std::invalid_argument("summary: r grid must start at r >= 0");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) throw std::invalid_argument("summary: r grid must be strictly increasing");
}

void validate_pair_inputs(const PointPattern& p, std::span<const double> r) {
  p.window.validate();
  validate_r_values(r);
  if (p.size() < 2) throw std::invalid_argument("summary: need at least 2 points");
  const double limit = 0.5 * std::min(p.window.width(), p.window.height());
  if (!(r.back() < limit)) throw std::invalid_argument("summary: r range too large for the window");
}

struct WeightedPair {
  double distance;
  double weight;  // 1 / |W cap W_v|, counted once per ordered pair
};

std::vector<WeightedPair> close_pairs(const PointPattern& p, double r_max) {
  std::vector<WeightedPair> pairs;
  const auto& z = p.points;
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (std::size_t j = i + 1; j < z.size(); ++j) {
      const auto v = z[i] - z[j];
      const double d = std::abs(v);
      if (d > r_max) continue;
      pairs.push_back({d, 2.0 / p.window.translated_overlap(v)});
    }
  }
  return pairs;
}

double inverse_lambda2(const PointPattern& p) {
  const double n = static_cast<double>(p.size());
  const double area = p.window.area();
  return area * area / (n * (n - 1.0));
}

// Uniform bucket grid for nearest-neighbour queries.
class BucketGrid {
 public:
  BucketGrid(const PointPattern& p, double cell) : window_(p.window), cell_(cell) {
    nx_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(window_.width() / cell_)));
    ny_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(window_.height() / cell_)));
    buckets_.resize(nx_ * ny_);
    for (const auto& z : p.points) buckets_[index(cell_x(z.real()), cell_y(z.imag()))].push_back(z);
  }

  /// Distance to the nearest point, or +inf when none lies within `cap`.
  double nearest(std::complex<double> q, double cap) const {
    const auto cx = static_cast<std::ptrdiff_t>(cell_x(q.real()));
    const auto cy = static_cast<std::ptrdiff_t>(cell_y(q.imag()));
    const auto max_ring = static_cast<std::ptrdiff_t>(std::ceil(cap / cell_)) + 1;
    double best2 = std::numeric_limits<double>::infinity();
    for (std::ptrdiff_t ring = 0; ring <= max_ring; ++ring) {
      for (std::ptrdiff_t dy = -ring; dy <= ring; ++dy) {
        for (std::ptrdiff_t dx = -ring; dx <= ring; ++dx) {
          if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
          const std::ptrdiff_t x = cx + dx;
          const std::ptrdiff_t y = cy + dy;
          if (x < 0 || y < 0 || x >= static_cast<std::ptrdiff_t>(nx_) || y >= static_cast<std::ptrdiff_t>(ny_))
            continue;
          for (const auto& z : buckets_[index(static_cast<std::size_t>(x), static_cast<std::size_t>(y))])
            best2 = std::min(best2, std::norm(z - q));
        }
      }
      // Anything beyond this ring is at least ring * cell away.
      const double reach = static_cast<double>(ring) * cell_;
      if (best2 <= reach * reach) break;
    }
    const double best = std::sqrt(best2);
    return best <= cap ? best : std::numeric_limits<double>::infinity();
  }

 private:
  std::size_t cell_x(double x) const {
    const double c = std::floor((x - window_.x_min) / cell_);
    return static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(nx_ - 1)));
  }
  std::size_t cell_y(double y) const {
    const double c = std::floor((y - window_.y_min) / cell_);
    return static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(ny_ - 1)));
  }
  std::size_t index(std::size_t x, std::size_t y) const { return y * nx_ + x; }

  Window window_;
  double cell_;
  std::size_t nx_ = 1;
  std::size_t ny_ = 1;
  std::vector<std::vector<std::complex<double>>> buckets_;
};

}  // namespace

const char* to_string(SummaryKind kind) {
  switch (kind) {
    case SummaryKind::K: return "K";
    case SummaryKind::L: return "L";
    case SummaryKind::F: return "F";
    case SummaryKind::Pcf: return "pcf";
  }
  return "?";
}

void SummaryCurve::validate() const {
  if (r.size() != values.size()) throw std::invalid_argument("SummaryCurve: length mismatch");
  validate_r_values(r);
}

std::vector<double> linear_r_grid(double r_min, double r_max, std::size_t n) {
  if (n < 2 || !(r_max > r_min) || !(r_min >= 0.0)) throw std::invalid_argument("linear_r_grid: invalid range");
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = r_min + (r_max - r_min) * static_cast<double>(i) / static_cast<double>(n - 1);
  return r;
}

std::vector<double> default_r_grid(const Window& w) {
  w.validate();
  return linear_r_grid(0.0, 0.25 * std::min(w.width(), w.height()), 64);
}

std::pair<SummaryCurve, SummaryCurve> estimate_K_L(const PointPattern& p, std::span<const double> r_values) {
  validate_pair_inputs(p, r_values);
  auto pairs = close_pairs(p, r_values.back());
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.distance < b.distance; });
  const double scale = inverse_lambda2(p);

  SummaryCurve K{{r_values.begin(), r_values.end()}, {}, SummaryKind::K, "ripley", "translation"};
  SummaryCurve L{K.r, {}, SummaryKind::L, "ripley", "translation"};
  K.values.reserve(r_values.size());
  L.values.reserve(r_values.size());
  std::size_t next = 0;
  double cumulative = 0.0;
  for (double r : r_values) {
    while (next < pairs.size() && pairs[next].distance < r) cumulative += pairs[next++].weight;
    const double k = scale * cumulative;
    K.values.push_back(k);
    L.values.push_back(std::sqrt(k / std::numbers::pi));
  }
  return {std::move(K), std::move(L)};
}

double default_query_spacing(const Window& w) {
  w.validate();
  return std::sqrt(w.area()) / 100.0;
}

SummaryCurve estimate_F(const PointPattern& p, std::span<const double> r_values, double query_spacing) {
  p.window.validate();
  validate_r_values(r_values);
  if (p.size() == 0) throw std::invalid_argument("estimate_F: empty pattern");
  if (!(query_spacing > 0.0)) throw std::invalid_argument("estimate_F: query spacing must be positive");
  const double r_max = r_values.back();
  const Window& w = p.window;
  if (!(2.0 * r_max < std::min(w.width(), w.height())))
    throw std::invalid_argument("estimate_F: r range too large for the window");

  const double cell = std::max(query_spacing, std::sqrt(w.area() / static_cast<double>(p.size())));
  const BucketGrid grid(p, cell);

  std::vector<double> distances;
  const auto nx = static_cast<std::size_t>(std::floor(w.width() / query_spacing));
  const auto ny = static_cast<std::size_t>(std::floor(w.height() / query_spacing));
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const std::complex<double> q{w.x_min + (static_cast<double>(ix) + 0.5) * query_spacing,
                                   w.y_min + (static_cast<double>(iy) + 0.5) * query_spacing};
      if (w.distance_to_boundary(q) < r_max) continue;
      distances.push_back(grid.nearest(q, r_max));
    }
  }
  if (distances.empty()) throw std::invalid_argument("estimate_F: no query point survives the border correction");
  std::sort(distances.begin(), distances.end());

  SummaryCurve F{{r_values.begin(), r_values.end()}, {}, SummaryKind::F, "empty-space", "border"};
  F.values.reserve(r_values.size());
  const double total = static_cast<double>(distances.size());
  for (double r : r_values) {
    const auto covered = std::upper_bound(distances.begin(), distances.end(), r) - distances.begin();
    F.values.push_back(static_cast<double>(covered) / total);
  }
  return F;
}

double default_pcf_bandwidth(const PointPattern& p) {
  p.window.validate();
  if (p.size() == 0) throw std::invalid_argument("default_pcf_bandwidth: empty pattern");
  const double lambda = static_cast<double>(p.size()) / p.window.area();
  return 0.15 / std::sqrt(lambda);
}

SummaryCurve estimate_pcf(const PointPattern& p, std::span<const double> r_values, double bandwidth) {
  validate_pair_inputs(p, r_values);
  if (!(bandwidth > 0.0)) throw std::invalid_argument("estimate_pcf: bandwidth must be positive");
  const auto pairs = close_pairs(p, r_values.back() + bandwidth);
  const double scale = inverse_lambda2(p);

  SummaryCurve g{{r_values.begin(), r_values.end()}, {}, SummaryKind::Pcf, "epanechnikov", "translation"};
  g.values.reserve(r_values.size());
  for (double r : r_values) {
    if (r == 0.0) {
      g.values.push_back(0.0);
      continue;
    }
    double acc = 0.0;
    for (const auto& pr : pairs) {
      const double u = (r - pr.distance) / bandwidth;
      if (std::abs(u) >= 1.0) continue;
      acc += 0.75 * (1.0 - u * u) / bandwidth * pr.weight;
    }
    g.values.push_back(scale * acc / (2.0 * std::numbers::pi * r));
  }
  return g;
}

SummaryCurve estimate_pcf_pooled(std::span<const PointPattern> patterns, std::span<const double> r_values,
                                 double bandwidth) {
  if (patterns.empty()) throw std::invalid_argument("estimate_pcf_pooled: no patterns");
  SummaryCurve pooled = estimate_pcf(patterns.front(), r_values, bandwidth);
  for (std::size_t i = 1; i < patterns.size(); ++i) {
    const auto g = estimate_pcf(patterns[i], r_values, bandwidth);
    for (std::size_t j = 0; j < g.values.size(); ++j) pooled.values[j] += g.values[j];
  }
  for (auto& v : pooled.values) v /= static_cast<double>(patterns.size());
  pooled.estimator = "epanechnikov-pooled";
  return pooled;
}

CountMoments count_variance(std::span<const PointPattern> patterns, double r) {
  if (patterns.size() < 30) throw std::invalid_argument("count_variance: need at least 30 patterns");
  if (!(r > 0.0)) throw std::invalid_argument("count_variance: radius must be positive");
  std::vector<double> counts;
  counts.reserve(patterns.size());
  for (const auto& p : patterns) {
    const auto c = p.window.center();
    if (p.window.distance_to_boundary(c) < r) throw std::invalid_argument("count_variance: disk not contained in window");
    counts.push_back(static_cast<double>(
        std::count_if(p.points.begin(), p.points.end(), [&](auto z) { return std::abs(z - c) < r; })));
  }
  CountMoments m;
  for (double c : counts) m.mean += c;
  m.mean /= static_cast<double>(counts.size());
  for (double c : counts) m.variance += (c - m.mean) * (c - m.mean);
  m.variance /= static_cast<double>(counts.size() - 1);
  return m;
}

}  // namespace tfz
