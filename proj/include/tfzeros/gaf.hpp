#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "tfzeros/pattern.hpp"
#include "tfzeros/random.hpp"

namespace tfz {

using cplx = std::complex<double>;

/// Truncated planar GAF  sum_{k=0}^{n} xi_k sqrt(gamma^k / k!) z^k.
struct PlanarGafSample {
  double gamma = 1.0;
  std::vector<cplx> coeffs;  // xi_0 .. xi_n

  std::size_t n_terms() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  /// Radius inside which the truncation is trusted: 0.8 sqrt(n_terms / gamma).
  double validity_radius() const;
};

PlanarGafSample sample_planar_gaf(double gamma, std::size_t n_terms, SeededStream stream);

struct GafValue {
  cplx value;
  cplx derivative;
};

/// Nested (Horner) evaluation in w = sqrt(gamma) z with the 1/sqrt(k!) scaling
/// folded into each step. Throws std::domain_error outside the validity disk.
cplx gaf_eval(const PlanarGafSample& sample, cplx z);
GafValue gaf_eval_with_derivative(const PlanarGafSample& sample, cplx z);

/// Covariance kernel exp(gamma z conj(w)).
cplx planar_kernel(double gamma, cplx z, cplx w);
/// Wirtinger derivatives d_z K = gamma conj(w) K and d_z d_wbar K = gamma (1 + gamma z conj(w)) K.
cplx planar_kernel_dz(double gamma, cplx z, cplx w);
cplx planar_kernel_dz_dwbar(double gamma, cplx z, cplx w);

struct GafZerosResult {
  PointPattern pattern;
  PlanarGafSample sample;
};

/// Zeros of one truncated planar GAF inside `window`: log-modulus on a grid of
/// spacing 0.05/sqrt(gamma), strict grid minima, then 10 Newton steps on the
/// analytic series. Throws std::domain_error if the window leaves the
/// validity disk.
GafZerosResult gaf_zeros(double gamma, const Window& window, std::size_t n_terms, SeededStream stream);
/// Same procedure on an existing sample.
PointPattern gaf_zeros_of(const PlanarGafSample& sample, const Window& window);

/// gamma / pi.
double first_intensity(double gamma);

/// (1/4pi) Laplacian of log K(z, z), by a 5-point central difference of step h.
double edelman_kostlan_intensity(const std::function<double(cplx)>& kernel_diagonal, cplx z, double h = 1e-3);

/// Pair correlation of the planar GAF zeros as a function of distance:
///   g(t) = [(sinh^2 t + t^2) cosh t - 2 t sinh t] / sinh^3 t,  t = gamma r^2 / 2.
/// The default gamma = 1/2 matches the zeros of the Gaussian spectrogram of
/// white noise (t = r^2 / 4).
double pair_correlation_planar(double r, double gamma = 0.5);

inline constexpr std::size_t kMaxJointIntensityPoints = 12;

/// n-point joint intensity of the planar GAF zeros,
///   per(C - B A^{-1} B^*) / det(pi A),
/// with A = K(zeta_k, zeta_l), B = d_z K, C = d_z d_wbar K. Throws
/// std::domain_error("degenerate configuration") for a singular A and
/// std::invalid_argument beyond 12 points.
double joint_intensity(double gamma, std::span<const cplx> points);

/// Ryser's formula with Gray-code updates.
cplx permanent(std::span<const cplx> matrix, std::size_t n);

/// exp(-(3 e^2 / 4) r^4); only meaningful as r grows.
double hole_probability_asymptote(double r);

/// Homogeneous Poisson process of intensity lambda on a window.
PointPattern sample_poisson(double lambda, const Window& window, SeededStream stream);

}  // namespace tfz
