// Asymptotic covariances and mean densities of the intrinsic volumes of the
// planar Boolean model with aligned a x b rectangles, plus quadrature
// routines that check the closed forms independently.
//
// Notation: r = gamma * v2, q = 1 - p = exp(-r), and
//   H(r) = int_0^1 int_0^1 (exp(r s t) - 1) ds dt = sum_k r^k / (k! (k+1)^2).
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace boolmodel::analytic {

/// Boolean model of aligned a x b rectangles at intensity gamma.
struct RectModel {
  double a = 1.0;
  double b = 1.0;
  double gamma = 1.0;

  RectModel() = default;
  RectModel(double a_, double b_, double gamma_) : a(a_), b(b_), gamma(gamma_) {
    if (!(a > 0.0) || !(b > 0.0) || !(gamma > 0.0) || !std::isfinite(a) || !std::isfinite(b) ||
        !std::isfinite(gamma)) {
      throw std::invalid_argument("RectModel requires positive finite a, b, gamma");
    }
  }

  double v2() const { return a * b; }
  double v1() const { return a + b; }
  double r() const { return gamma * v2(); }
  /// Volume fraction.
  double p() const { return -std::expm1(-r()); }
  double q() const { return std::exp(-r()); }
};

using CovMatrix = Eigen::Matrix3d;

inline constexpr double kSeriesOverflowGuard = 700.0;

/// H(r) by its power series, summed until a term drops below 1e-16 of the
/// running sum.
inline double h_series(double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("h_series: r must be >= 0");
  if (r > kSeriesOverflowGuard) throw std::invalid_argument("h_series: r beyond overflow guard");
  double power = 1.0;  // r^k / k!
  double sum = 0.0;
  for (int k = 1; k < 5000; ++k) {
    power *= r / k;
    const double term = power / ((k + 1.0) * (k + 1.0));
    sum += term;
    if (term <= 1e-16 * sum && k > r) break;
    if (sum == 0.0) break;
  }
  return sum;
}

// Closed forms of int_0^1 int_0^1 exp(r s t) w(s, t) ds dt for the weights
// used by the rectangle covariances. Valid for r > 0.
inline double int_exp_s(double r) { return std::exp(r) / (r * r) - 1.0 / (r * r) - 1.0 / r; }
inline double int_exp_s2(double r) {
  const double e = std::exp(r);
  return e / (r * r) - e / (r * r * r) + 1.0 / (r * r * r) - 1.0 / (2.0 * r);
}
inline double int_exp_st(double r) {
  return std::exp(r) / (r * r) - 1.0 / (r * r) - h_series(r) / r - 1.0 / r;
}
inline double int_exp_st_s2(double r) {
  const double e = std::exp(r);
  return 2.0 * e / (r * r) - e / (r * r * r) + 1.0 / (r * r * r) - 1.0 / (r * r) - 1.5 / r -
         h_series(r) / r;
}

/// sigma(V2, V2).
inline double cov_v2_v2(const RectModel& m) {
  const double q = m.q();
  return 4.0 * q * q * m.v2() * h_series(m.r());
}

/// sigma(V1, V2).
inline double cov_v1_v2(const RectModel& m) {
  const double r = m.r();
  const double q = m.q();
  return 2.0 * q * q * m.v1() * (std::expm1(r) / r - 1.0 - 2.0 * r * h_series(r));
}

/// sigma(V0, V2), from the unsimplified sum of its three contributions:
/// p q - 4 q^2 r (1 - r) H - 4 q^2 (1/q - 1 - r).
inline double cov_v0_v2(const RectModel& m) {
  const double r = m.r();
  const double p = m.p();
  const double q = m.q();
  return q * (4.0 * q * r - 3.0 * p - 4.0 * q * r * (1.0 - r) * h_series(r));
}

/// sigma(V1, V1); the only entry that depends on a and b beyond v1, v2.
inline double cov_v1_v1(const RectModel& m) {
  const double g = m.gamma;
  const double r = m.r();
  const double p = m.p();
  const double q = m.q();
  const double v1 = m.v1();
  const double v2 = m.v2();
  const double ab2 = m.a * m.a + m.b * m.b;
  return q * (2.0 * p + 4.0 * q * g * g * v1 * v1 * v2 * h_series(r) -
              4.0 * g * g * v1 * v1 * (p / (g * g * v2) - q / g) +
              2.0 * ab2 * (1.0 / v2 - p / (g * v2 * v2)));
}

/// sigma(V0, V1).
inline double cov_v0_v1(const RectModel& m) {
  const double r = m.r();
  const double p = m.p();
  const double q = m.q();
  return q * m.gamma * m.v1() * (1.0 + 2.0 * p + q * r * (4.0 * (1.0 - r) * h_series(r) - 6.0));
}

/// sigma(V0, V0).
inline double cov_v0_v0(const RectModel& m) {
  const double r = m.r();
  const double p = m.p();
  const double q = m.q();
  return q * m.gamma *
         (1.0 + 2.0 * p + (4.0 * p - 7.0) * r +
          4.0 * q * r * (2.0 * r + (1.0 - r) * (1.0 - r) * h_series(r)));
}

/// sigma(Vi, Vj) for i, j in {0, 1, 2}.
inline double cov(const RectModel& m, int i, int j) {
  if (i > j) std::swap(i, j);
  switch (i * 3 + j) {
    case 0: return cov_v0_v0(m);
    case 1: return cov_v0_v1(m);
    case 2: return cov_v0_v2(m);
    case 4: return cov_v1_v1(m);
    case 5: return cov_v1_v2(m);
    case 8: return cov_v2_v2(m);
    default: throw std::invalid_argument("cov: indices must be in {0, 1, 2}");
  }
}

inline CovMatrix cov_matrix(const RectModel& m) {
  CovMatrix s;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) s(i, j) = s(j, i) = cov(m, i, j);
  return s;
}

inline double min_eigenvalue(const CovMatrix& s) {
  Eigen::SelfAdjointEigenSolver<CovMatrix> solver(s, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

/// Densities (per unit area) of E V0, E V1, E V2.
inline std::array<double, 3> mean_densities(const RectModel& m) {
  const double q = m.q();
  return {q * m.gamma * (1.0 - m.r()), q * m.gamma * m.v1(), m.p()};
}

/// Set covariogram V2(K cap (K + x)) of the centered a x b rectangle.
inline double covariogram(double x, double y, const RectModel& m) {
  const double ax = std::abs(x);
  const double ay = std::abs(y);
  if (ax > m.a || ay > m.b) return 0.0;
  return (m.a - ax) * (m.b - ay);
}

/// Scaled value sigma_{a,b,gamma}(Vi, Vj) predicted from the unit-square
/// model at intensity gamma * v2. Throws for (1, 1), which has no such
/// invariance.
inline double rescale(const RectModel& m, int i, int j) {
  if (i > j) std::swap(i, j);
  const RectModel unit(1.0, 1.0, m.r());
  const double v2 = m.v2();
  if (i == 1 && j == 1) {
    throw std::invalid_argument("rescale: sigma(V1, V1) is not determined by the unit-square model");
  }
  if (j == 1) {
    return std::pow(v2, 0.5 * i - 1.0) * 0.5 * m.v1() * cov(unit, i, 1);
  }
  if (i == 1) {
    return std::pow(v2, 0.5 * j - 1.0) * 0.5 * m.v1() * cov(unit, 1, j);
  }
  return std::pow(v2, 0.5 * i + 0.5 * j - 1.0) * cov(unit, i, j);
}

// ---------------------------------------------------------------------------
// Quadrature.

struct QuadratureOptions {
  double relative_tolerance = 1e-12;
  unsigned max_depth = 20;
};

/// Adaptive 15-point Gauss-Kronrod integral over [lo, hi].
template <class F>
double integrate_1d(F&& f, double lo, double hi, const QuadratureOptions& opt = {}) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  return Rule::integrate(std::forward<F>(f), lo, hi, opt.max_depth, opt.relative_tolerance);
}

/// Tensor-product adaptive integral over [x0, x1] x [y0, y1].
template <class F>
double integrate_2d(F&& f, double x0, double x1, double y0, double y1,
                    const QuadratureOptions& opt = {}) {
  return integrate_1d(
      [&](double x) { return integrate_1d([&](double y) { return f(x, y); }, y0, y1, opt); }, x0,
      x1, opt);
}

/// H(r) from its integral representation.
inline double h_quadrature(double r) {
  return integrate_2d([r](double s, double t) { return std::expm1(r * s * t); }, 0.0, 1.0, 0.0,
                      1.0);
}

struct SupportBox {
  double half_x;
  double half_y;
};

/// (1 - p)^2 * int (exp(gamma C(x)) - 1) dx for an arbitrary (centrally
/// symmetric) covariogram vanishing outside [-half_x, half_x] x
/// [-half_y, half_y]. v2 is taken as C(0, 0). With four_fold the covariogram
/// is assumed even in each coordinate and only one quadrant is integrated.
inline double quad_cov_v2_v2(const std::function<double(double, double)>& covario, double gamma,
                             SupportBox box, bool four_fold = false) {
  const double v2 = covario(0.0, 0.0);
  const double q = std::exp(-gamma * v2);
  auto f = [&](double x, double y) { return std::expm1(gamma * covario(x, y)); };
  double integral = 0.0;
  if (four_fold) {
    integral = 4.0 * integrate_2d(f, 0.0, box.half_x, 0.0, box.half_y);
  } else {
    integral = 2.0 * (integrate_2d(f, 0.0, box.half_x, -box.half_y, 0.0) +
                      integrate_2d(f, 0.0, box.half_x, 0.0, box.half_y));
  }
  return q * q * integral;
}

}  // namespace boolmodel::analytic
