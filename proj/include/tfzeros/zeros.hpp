#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tfzeros/pattern.hpp"
#include "tfzeros/stft.hpp"

namespace tfz {

enum class ThresholdMode {
  None,      // every strict local minimum is a zero
  Relative,  // keep minima below epsilon * max(spectrogram)
};

struct ZeroExtractionConfig {
  ThresholdMode threshold_mode = ThresholdMode::None;
  double epsilon = 1e-4;
  /// Border width removed on every side, in time-frequency units. The default
  /// of 3 window standard deviations clears the zero-padded region.
  double margin = 3.0;

  void validate() const;
};

struct GridIndex {
  std::size_t row = 0;
  std::size_t col = 0;
  bool operator==(const GridIndex&) const = default;
};

/// Interior cells strictly below all 8 neighbours of a row-major rows x cols
/// field. Ties are not minima. Throws when either dimension is below 3.
std::vector<GridIndex> strict_local_minima(std::span<const double> values, std::size_t rows, std::size_t cols);

/// Window shrunk by `margin` on all sides; throws unless margin is below half
/// of each side.
Window shrink_window(const Window& w, double margin);

/// Window spanned by the spectrogram lattice: omega on x, t on y.
Window grid_window(const TFGrid& grid);

/// Minimal Grid Neighbours: strict 8-neighbour minima of the spectrogram,
/// optionally thresholded, mapped to z = omega + i t and restricted to the
/// interior of the margin-shrunk window (which becomes the pattern window).
PointPattern extract_zeros_mgn(const Spectrogram& spec, const ZeroExtractionConfig& cfg = {});

}  // namespace tfz
