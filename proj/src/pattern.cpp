#include "tfzeros/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tfz {

void Window::validate() const {
  if (!(x_max > x_min) || !(y_max > y_min) || !std::isfinite(area()))
    throw std::invalid_argument("Window: area must be positive");
}

double Window::distance_to_boundary(std::complex<double> z) const {
  return std::min({z.real() - x_min, x_max - z.real(), z.imag() - y_min, y_max - z.imag()});
}

double Window::translated_overlap(std::complex<double> v) const {
  const double a = width() - std::abs(v.real());
  const double b = height() - std::abs(v.imag());
  return (a > 0.0 && b > 0.0) ? a * b : 0.0;
}

void PointPattern::validate() const {
  window.validate();
  for (const auto& z : points)
    if (!window.contains(z)) throw std::invalid_argument("PointPattern: point outside window");
  auto sorted = points;
  std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("PointPattern: duplicate points");
}

}  // namespace tfz
