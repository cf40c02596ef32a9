#include "tfzeros/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tfz {

void ZeroExtractionConfig::validate() const {
  if (threshold_mode == ThresholdMode::Relative && !(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("zero extraction: epsilon must lie in (0, 1)");
  if (!(margin >= 0.0)) throw std::invalid_argument("zero extraction: margin must be >= 0");
}

std::vector<GridIndex> strict_local_minima(std::span<const double> values, std::size_t rows, std::size_t cols) {
  if (rows < 3 || cols < 3) throw std::invalid_argument("strict_local_minima: grid must be at least 3x3");
  if (values.size() != rows * cols) throw std::invalid_argument("strict_local_minima: size mismatch");
  std::vector<GridIndex> minima;
  for (std::size_t r = 1; r + 1 < rows; ++r) {
    const double* up = values.data() + (r - 1) * cols;
    const double* mid = values.data() + r * cols;
    const double* down = values.data() + (r + 1) * cols;
    for (std::size_t c = 1; c + 1 < cols; ++c) {
      const double v = mid[c];
      if (v < mid[c - 1] && v < mid[c + 1] && v < up[c - 1] && v < up[c] && v < up[c + 1] && v < down[c - 1] &&
          v < down[c] && v < down[c + 1])
        minima.push_back({r, c});
    }
  }
  return minima;
}

Window shrink_window(const Window& w, double margin) {
  w.validate();
  if (!(margin >= 0.0)) throw std::invalid_argument("shrink_window: margin must be >= 0");
  if (!(2.0 * margin < w.width()) || !(2.0 * margin < w.height()))
    throw std::invalid_argument("shrink_window: margin too large for window");
  return {w.x_min + margin, w.x_max - margin, w.y_min + margin, w.y_max - margin};
}

Window grid_window(const TFGrid& grid) {
  grid.validate();
  return {grid.omega_start, grid.omega_end(), grid.time(0), grid.time(grid.n_time() - 1)};
}

PointPattern extract_zeros_mgn(const Spectrogram& spec, const ZeroExtractionConfig& cfg) {
  cfg.validate();
  const auto minima = strict_local_minima(spec.values, spec.rows(), spec.cols());

  double threshold = std::numeric_limits<double>::infinity();
  if (cfg.threshold_mode == ThresholdMode::Relative) {
    const double peak = *std::max_element(spec.values.begin(), spec.values.end());
    threshold = cfg.epsilon * peak;
  }

  PointPattern pattern;
  pattern.window = shrink_window(grid_window(spec.grid), cfg.margin);
  for (const auto& m : minima) {
    if (!(spec.at(m.row, m.col) < threshold)) continue;
    const std::complex<double> z{spec.grid.omega(m.col), spec.grid.time(m.row)};
    if (pattern.window.strictly_contains(z)) pattern.points.push_back(z);
  }
  return pattern;
}

}  // namespace tfz
