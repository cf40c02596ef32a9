#pragma once

#include <complex>
#include <vector>

namespace tfz {

/// Axis-aligned rectangle [x_min, x_max] x [y_min, y_max] in the complex plane.
struct Window {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  void validate() const;  // throws unless the area is positive

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  std::complex<double> center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }

  bool contains(std::complex<double> z) const {
    return z.real() >= x_min && z.real() <= x_max && z.imag() >= y_min && z.imag() <= y_max;
  }
  bool strictly_contains(std::complex<double> z) const {
    return z.real() > x_min && z.real() < x_max && z.imag() > y_min && z.imag() < y_max;
  }
  /// Distance from z (inside) to the nearest edge.
  double distance_to_boundary(std::complex<double> z) const;
  /// Area of W intersected with W translated by v: (a - |v_x|)(b - |v_y|), clipped at 0.
  double translated_overlap(std::complex<double> v) const;

  bool operator==(const Window&) const = default;
};

/// Finite planar point set observed through a window. Coordinates are
/// complex numbers z = x + i y; for time-frequency patterns x = omega, y = t.
struct PointPattern {
  std::vector<std::complex<double>> points;
  Window window;

  std::size_t size() const { return points.size(); }
  /// Throws if any point lies outside the window or two points coincide.
  void validate() const;
};

}  // namespace tfz
