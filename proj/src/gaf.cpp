#include "tfzeros/gaf.hpp"

#include <Eigen/Dense>
#include <Eigen/LU>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tfzeros/zeros.hpp"

namespace tfz {
namespace {

constexpr double kGridSpacing = 0.05;
constexpr int kNewtonSteps = 10;
constexpr double kMaxCondition = 1e12;

// Horner recurrence in w = sqrt(gamma) z:
//   p_n = xi_n,  p_k = xi_k + w / sqrt(k + 1) * p_{k+1},  f = p_0.
// Terms above `top` are dropped; callers pick `top` so the tail is negligible.
GafValue horner(const PlanarGafSample& s, cplx z, std::size_t top, bool want_derivative) {
  const cplx w = std::sqrt(s.gamma) * z;
  cplx p = s.coeffs[top];
  cplx q = 0.0;
  for (std::size_t k = top; k-- > 0;) {
    const double inv = 1.0 / std::sqrt(static_cast<double>(k + 1));
    if (want_derivative) q = inv * (p + w * q);
    p = s.coeffs[k] + w * inv * p;
  }
  return {p, std::sqrt(s.gamma) * q};
}

std::size_t effective_top(const PlanarGafSample& s, double radius) {
  const double m = s.gamma * radius * radius;
  const double top = m + 12.0 * std::sqrt(m) + 40.0;
  return std::min(s.n_terms(), static_cast<std::size_t>(top));
}

void require_in_validity(const PlanarGafSample& s, cplx z) {
  if (std::abs(z) > s.validity_radius())
    throw std::domain_error("gaf: evaluation point outside the truncation validity disk");
}

}  // namespace

double PlanarGafSample::validity_radius() const {
  return 0.8 * std::sqrt(static_cast<double>(n_terms()) / gamma);
}

PlanarGafSample sample_planar_gaf(double gamma, std::size_t n_terms, SeededStream stream) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gaf: gamma must be positive");
  if (n_terms == 0) throw std::invalid_argument("gaf: need at least one term");
  Rng rng(stream);
  PlanarGafSample s{gamma, std::vector<cplx>(n_terms + 1)};
  for (auto& c : s.coeffs) c = rng.complex_normal();
  return s;
}

cplx gaf_eval(const PlanarGafSample& sample, cplx z) {
  require_in_validity(sample, z);
  return horner(sample, z, sample.n_terms(), false).value;
}

GafValue gaf_eval_with_derivative(const PlanarGafSample& sample, cplx z) {
  require_in_validity(sample, z);
  return horner(sample, z, sample.n_terms(), true);
}

cplx planar_kernel(double gamma, cplx z, cplx w) { return std::exp(gamma * z * std::conj(w)); }

cplx planar_kernel_dz(double gamma, cplx z, cplx w) { return gamma * std::conj(w) * planar_kernel(gamma, z, w); }

cplx planar_kernel_dz_dwbar(double gamma, cplx z, cplx w) {
  return gamma * (1.0 + gamma * z * std::conj(w)) * planar_kernel(gamma, z, w);
}

PointPattern gaf_zeros_of(const PlanarGafSample& sample, const Window& window) {
  window.validate();
  const double h = kGridSpacing / std::sqrt(sample.gamma);
  const double pad = 2.0 * h;
  const Window grid{window.x_min - pad, window.x_max + pad, window.y_min - pad, window.y_max + pad};
  const double corner = std::max({std::abs(cplx(grid.x_min, grid.y_min)), std::abs(cplx(grid.x_min, grid.y_max)),
                                  std::abs(cplx(grid.x_max, grid.y_min)), std::abs(cplx(grid.x_max, grid.y_max))});
  if (corner > sample.validity_radius())
    throw std::domain_error("gaf_zeros: window too large for the truncation order");

  const auto cols = static_cast<std::size_t>(std::ceil(grid.width() / h)) + 1;
  const auto rows = static_cast<std::size_t>(std::ceil(grid.height() / h)) + 1;
  std::vector<double> field(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const double y = grid.y_min + static_cast<double>(r) * h;
    for (std::size_t c = 0; c < cols; ++c) {
      const cplx z{grid.x_min + static_cast<double>(c) * h, y};
      const cplx f = horner(sample, z, effective_top(sample, std::abs(z)), false).value;
      // log |f| - gamma |z|^2 / 2 keeps the field in range; minima are unchanged.
      field[r * cols + c] = std::log(std::abs(f)) - 0.5 * sample.gamma * std::norm(z);
    }
  }

  PointPattern pattern;
  pattern.window = window;
  for (const auto& m : strict_local_minima(field, rows, cols)) {
    const cplx start{grid.x_min + static_cast<double>(m.col) * h, grid.y_min + static_cast<double>(m.row) * h};
    cplx z = start;
    double step = 0.0;
    for (int it = 0; it < kNewtonSteps; ++it) {
      const auto fv = horner(sample, z, sample.n_terms(), true);
      if (fv.derivative == 0.0) break;
      const cplx delta = fv.value / fv.derivative;
      z -= delta;
      step = std::abs(delta);
    }
    if (!(step < 1e-8) || std::abs(z - start) > 2.0 * h) continue;
    if (window.contains(z)) pattern.points.push_back(z);
  }

  // Neighbouring grid minima can converge to the same root.
  std::sort(pattern.points.begin(), pattern.points.end(),
            [](cplx a, cplx b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); });
  std::vector<cplx> unique;
  for (const auto& z : pattern.points) {
    const bool dup = std::any_of(unique.rbegin(), unique.rend(), [&](cplx u) { return std::abs(u - z) < 1e-7; });
    if (!dup) unique.push_back(z);
  }
  pattern.points = std::move(unique);
  return pattern;
}

GafZerosResult gaf_zeros(double gamma, const Window& window, std::size_t n_terms, SeededStream stream) {
  auto sample = sample_planar_gaf(gamma, n_terms, stream);
  auto pattern = gaf_zeros_of(sample, window);
  return {std::move(pattern), std::move(sample)};
}

double first_intensity(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("first_intensity: gamma must be positive");
  return gamma / std::numbers::pi;
}

double edelman_kostlan_intensity(const std::function<double(cplx)>& kernel_diagonal, cplx z, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("edelman_kostlan_intensity: step must be positive");
  auto u = [&](cplx p) { return std::log(kernel_diagonal(p)); };
  const double lap = (u(z + h) + u(z - h) + u(z + cplx(0, h)) + u(z - cplx(0, h)) - 4.0 * u(z)) / (h * h);
  return lap / (4.0 * std::numbers::pi);
}

double pair_correlation_planar(double r, double gamma) {
  if (!(r >= 0.0)) throw std::invalid_argument("pair_correlation_planar: r must be >= 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("pair_correlation_planar: gamma must be positive");
  const double t = 0.5 * gamma * r * r;
  if (t == 0.0) return 0.0;
  if (t < 0.05) {
    // Taylor expansion; the closed form cancels catastrophically near 0.
    const double t2 = t * t;
    return t * (1.0 + t2 * (-2.0 / 9.0 + t2 * (2.0 / 45.0 + t2 * (-4.0 / 525.0 + t2 * (2.0 / 1701.0)))));
  }
  // coth t (1 + t^2 / sinh^2 t) - 2t / sinh^2 t, written to avoid overflow.
  const double inv_sinh = t > 20.0 ? 2.0 * std::exp(-t) / (1.0 - std::exp(-2.0 * t)) : 1.0 / std::sinh(t);
  const double inv_sinh2 = inv_sinh * inv_sinh;
  const double coth = 1.0 / std::tanh(t);
  return coth * (1.0 + t * t * inv_sinh2) - 2.0 * t * inv_sinh2;
}

cplx permanent(std::span<const cplx> matrix, std::size_t n) {
  if (matrix.size() != n * n) throw std::invalid_argument("permanent: size mismatch");
  if (n == 0) return 1.0;
  if (n > 30) throw std::invalid_argument("permanent: matrix too large");
  std::vector<cplx> row_sums(n, 0.0);
  cplx total = 0.0;
  std::uint64_t gray = 0;
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t g = 1; g < subsets; ++g) {
    const int j = std::countr_zero(g);
    gray ^= std::uint64_t{1} << j;
    const double sign_col = (gray >> j) & 1u ? 1.0 : -1.0;
    cplx prod = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      row_sums[i] += sign_col * matrix[i * n + static_cast<std::size_t>(j)];
      prod *= row_sums[i];
    }
    total += (std::popcount(gray) % 2 == 0 ? 1.0 : -1.0) * prod;
  }
  return (n % 2 == 0 ? 1.0 : -1.0) * total;
}

double joint_intensity(double gamma, std::span<const cplx> points) {
  if (!(gamma > 0.0)) throw std::invalid_argument("joint_intensity: gamma must be positive");
  const std::size_t n = points.size();
  if (n == 0) throw std::invalid_argument("joint_intensity: need at least one point");
  if (n > kMaxJointIntensityPoints) throw std::invalid_argument("joint_intensity: at most 12 points");

  // Each matrix is conjugated by D = diag(exp(-gamma |zeta_k|^2 / 2)); the
  // permanent and the determinant both pick up prod d_k^2, so the ratio is
  // unchanged while the entries stay bounded by 1 in modulus.
  using Mat = Eigen::MatrixXcd;
  Mat A(n, n), B(n, n), Bstar(n, n), C(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      const cplx zk = points[k];
      const cplx zl = points[l];
      const cplx a = std::exp(gamma * zk * std::conj(zl) - 0.5 * gamma * (std::norm(zk) + std::norm(zl)));
      const auto i = static_cast<Eigen::Index>(k);
      const auto j = static_cast<Eigen::Index>(l);
      A(i, j) = a;
      B(i, j) = gamma * std::conj(zl) * a;             // E[F'(zk) conj F(zl)]
      Bstar(i, j) = gamma * zk * a;                    // E[F(zk) conj F'(zl)]
      C(i, j) = gamma * (1.0 + gamma * zk * std::conj(zl)) * a;  // E[F'(zk) conj F'(zl)]
    }
  }

  Eigen::PartialPivLU<Mat> lu(A);
  const double rcond = lu.rcond();
  if (!(rcond > 1.0 / kMaxCondition)) throw std::domain_error("degenerate configuration");

  const Mat M = C - B * lu.solve(Bstar);
  std::vector<cplx> m(n * n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) m[k * n + l] = M(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
  const cplx per = permanent(m, n);
  const cplx det = lu.determinant() * std::pow(std::numbers::pi, static_cast<double>(n));
  return (per / det).real();
}

double hole_probability_asymptote(double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("hole_probability_asymptote: r must be >= 0");
  const double r2 = r * r;
  return std::exp(-0.75 * std::numbers::e * std::numbers::e * r2 * r2);
}

PointPattern sample_poisson(double lambda, const Window& window, SeededStream stream) {
  if (!(lambda > 0.0)) throw std::invalid_argument("sample_poisson: lambda must be positive");
  window.validate();
  Rng rng(stream);
  const std::uint64_t count = rng.poisson(lambda * window.area());
  PointPattern p;
  p.window = window;
  p.points.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i)
    p.points.emplace_back(rng.uniform(window.x_min, window.x_max), rng.uniform(window.y_min, window.y_max));
  return p;
}

}  // namespace tfz
