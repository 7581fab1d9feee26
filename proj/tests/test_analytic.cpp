#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "boolmodel/analytic.hpp"

using namespace boolmodel::analytic;

namespace {

constexpr std::array<double, 5> kRadii{0.5, 1.0, 2.0, 4.0, 8.0};

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

}  // namespace

TEST(HSeries, ZeroAndReferenceValue) {
  EXPECT_EQ(h_series(0.0), 0.0);
  // Reference quoted to seven digits (truncated); full value from the
  // power series summed independently.
  EXPECT_NEAR(h_series(1.0), 0.3179021, 1e-7);
  EXPECT_NEAR(h_series(1.0), 0.31790215145440387, 1e-15);
}

TEST(HSeries, MatchesQuadrature) {
  for (double r : kRadii) EXPECT_NEAR(h_series(r), h_quadrature(r), 1e-10) << "r = " << r;
}

TEST(HSeries, RejectsOutOfRange) {
  EXPECT_THROW(h_series(-1.0), std::invalid_argument);
  EXPECT_THROW(h_series(701.0), std::invalid_argument);
  EXPECT_NO_THROW(h_series(700.0));
}

TEST(HSeries, LargeArgumentAccuracy) {
  // H(r) ~ e^r / r^2 asymptotically; compare with quadrature relative.
  EXPECT_LT(rel(h_series(30.0), h_quadrature(30.0)), 1e-10);
}

TEST(Identities, ClosedFormsMatchQuadrature) {
  for (double r : kRadii) {
    auto q = [r](auto w) {
      return integrate_2d([&](double s, double t) { return std::exp(r * s * t) * w(s, t); }, 0.0, 1.0, 0.0, 1.0);
    };
    EXPECT_LT(rel(int_exp_s(r), q([](double s, double) { return s; })), 1e-8) << r;
    EXPECT_LT(rel(int_exp_s2(r), q([](double s, double) { return s * s; })), 1e-8) << r;
    EXPECT_LT(rel(int_exp_st(r), q([](double s, double t) { return s * t; })), 1e-8) << r;
    EXPECT_LT(rel(int_exp_st_s2(r), q([](double s, double t) { return s * t + s * s; })), 1e-8) << r;
  }
}

TEST(Identities, CovariogramIntegralIsFourV2H) {
  for (double a : {1.0, 2.0})
    for (double b : {0.5, 1.0})
      for (double g : {0.5, 1.0, 2.0}) {
        const RectModel m(a, b, g);
        const double integral = 4.0 * integrate_2d(
                                          [&](double x, double y) { return std::expm1(g * covariogram(x, y, m)); },
                                          0.0, a, 0.0, b);
        EXPECT_LT(rel(integral, 4.0 * m.v2() * h_series(m.r())), 1e-6);
      }
}

TEST(Covariogram, Values) {
  const RectModel m(2.0, 0.5, 1.0);
  EXPECT_EQ(covariogram(0, 0, m), 1.0);
  EXPECT_EQ(covariogram(2.0, 0, m), 0.0);
  EXPECT_EQ(covariogram(1.0, 0.25, m), 0.25);
  EXPECT_EQ(covariogram(-1.0, -0.25, m), 0.25);
  EXPECT_EQ(covariogram(3.0, 0, m), 0.0);
}

TEST(QuadOracle, MatchesClosedFormVolumeVariance) {
  for (double a : {1.0, 2.0})
    for (double b : {0.5, 1.0})
      for (double g : {0.5, 1.0, 2.0}) {
        const RectModel m(a, b, g);
        auto c = [&](double x, double y) { return covariogram(x, y, m); };
        EXPECT_LT(rel(quad_cov_v2_v2(c, g, {a, b}), cov_v2_v2(m)), 1e-6);
        EXPECT_LT(rel(quad_cov_v2_v2(c, g, {a, b}, true), cov_v2_v2(m)), 1e-6);
      }
}

TEST(QuadOracle, SmallIntensityVanishes) {
  const RectModel m(1.0, 1.0, 1e-9);
  auto c = [&](double x, double y) { return covariogram(x, y, m); };
  EXPECT_LT(std::abs(quad_cov_v2_v2(c, 1e-9, {1.0, 1.0})), 1e-8);
}

TEST(QuadOracle, AcceptsOtherCovariograms) {
  // Unit disc: C(x) = 2 acos(d/2) - (d/2) sqrt(4 - d^2), d = |x| <= 2.
  auto disc = [](double x, double y) {
    const double d = std::hypot(x, y);
    if (d >= 2.0) return 0.0;
    return 2.0 * std::acos(d / 2.0) - 0.5 * d * std::sqrt(4.0 - d * d);
  };
  const double g = 0.3;
  const double v = quad_cov_v2_v2(disc, g, {2.0, 2.0});
  // Radial 1D reference integral.
  const double q = std::exp(-g * std::numbers::pi);
  const double radial = integrate_1d([&](double d) { return 2.0 * std::numbers::pi * d * std::expm1(g * disc(d, 0.0)); },
                                     0.0, 2.0);
  EXPECT_LT(rel(v, q * q * radial), 1e-6);
}

TEST(ClosedForms, UnitSquareReferenceValues) {
  const RectModel m(1.0, 1.0, 1.0);
  const double e = std::numbers::e;
  const double h = h_series(1.0);
  EXPECT_NEAR(cov_v2_v2(m), 0.172094, 1e-6);
  EXPECT_NEAR(cov_v2_v2(m), 4.0 * std::exp(-2.0) * h, 1e-15);
  EXPECT_NEAR(cov_v1_v2(m), 2.0 * std::exp(-2.0) * 2.0 * ((e - 1.0) - 1.0 - 2.0 * h), 1e-15);
  // Sum of the three contributions to sigma(V0, V2): p q from the volume
  // term, the H term and the mixed term.
  const double r = 1.0, p = 1.0 - 1.0 / e, q = 1.0 / e;
  EXPECT_NEAR(cov_v0_v2(m), p * q - 4.0 * q * q * r * (1.0 - r) * h - 4.0 * q * q * (1.0 / q - 1.0 - r), 1e-14);
}

TEST(ClosedForms, ValueDependsOnlyOnVolumeForVolumeVariance) {
  EXPECT_DOUBLE_EQ(cov_v2_v2(RectModel(2.0, 0.5, 1.0)), cov_v2_v2(RectModel(1.0, 1.0, 1.0)));
}

TEST(ClosedForms, VanishInSparseAndDenseLimits) {
  for (double g : {1e-10, 200.0}) {
    const auto s = cov_matrix(RectModel(1.0, 0.5, g));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) EXPECT_LT(std::abs(s(i, j)), 1e-8) << g << " " << i << j;
  }
}

TEST(ClosedForms, EulerVarianceSparseLimit) {
  for (double g : {1e-4, 1e-6}) EXPECT_NEAR(cov_v0_v0(RectModel(1.0, 1.0, g)) / g, 1.0, 10 * g);
}

TEST(ClosedForms, DenseDecayIsMonotone) {
  const double b = 0.5;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      double prev = std::abs(cov(RectModel(1.0, b, 20.0 / b), i, j));
      for (double r = 22.0; r <= 60.0; r += 2.0) {
        const double cur = std::abs(cov(RectModel(1.0, b, r / b), i, j));
        EXPECT_LT(cur, prev) << i << j << " r=" << r;
        prev = cur;
      }
    }
  }
}

TEST(ClosedForms, Signs) {
  // Area and perimeter correlate positively for sparse models.
  EXPECT_GT(cov_v1_v2(RectModel(1.0, 1.0, 0.1)), 0.0);
  // Area anti-correlates with Euler characteristic and perimeter at
  // higher intensities.
  for (double g : {1.5, 2.0, 2.5}) {
    EXPECT_LT(cov_v0_v2(RectModel(1.0, 1.0, g)), 0.0) << g;
    EXPECT_LT(cov_v1_v2(RectModel(1.0, 1.0, g)), 0.0) << g;
  }
  for (double r = 0.05; r <= 8.0; r += 0.05) EXPECT_GT(cov_v0_v0(RectModel(1.0, 0.5, r / 0.5)), 0.0);
  // Aligned grains: sigma(V0, V1) > 0 across the scanned intensities.
  for (double r = 0.1; r <= 2.5; r += 0.1) EXPECT_GT(cov_v0_v1(RectModel(1.0, 0.5, r / 0.5)), 0.0) << r;
}

TEST(ClosedForms, PerimeterVarianceDependsOnAspectRatio) {
  // v2 = 1 and gamma v2 = 1 in both; b/a = 1 vs 1/2.
  const double square = cov_v1_v1(RectModel(1.0, 1.0, 1.0));
  const double oblong = cov_v1_v1(RectModel(std::sqrt(2.0), std::sqrt(0.5), 1.0));
  EXPECT_GT(std::abs(square - oblong), 1e-3);
}

TEST(CovMatrix, SymmetricPositiveDefinite) {
  for (double r : {0.1, 0.5, 1.0, 2.0, 4.0, 6.0}) {
    for (double aspect : {1.0, 0.5, 0.25}) {
      const double a = 1.0 / std::sqrt(aspect);
      const RectModel m(a, aspect * a, r);
      const auto s = cov_matrix(m);
      EXPECT_TRUE(s.isApprox(s.transpose(), 0.0));
      EXPECT_GT(min_eigenvalue(s), 0.0) << "r=" << r << " aspect=" << aspect;
    }
  }
}

TEST(Means, Densities) {
  const RectModel m(1.0, 1.0, 1.0);
  const auto d = mean_densities(m);
  EXPECT_EQ(d[0], 0.0);
  EXPECT_DOUBLE_EQ(d[2], 1.0 - std::exp(-1.0));
  const RectModel sparse(2.0, 0.5, 1e-9);
  const auto s = mean_densities(sparse);
  EXPECT_NEAR(s[0] / 1e-9, 1.0, 1e-8);
  EXPECT_NEAR(s[1] / 1e-9, 2.5, 1e-8);
  EXPECT_NEAR(s[2] / 1e-9, 1.0, 1e-8);
  EXPECT_GT(mean_densities(RectModel(1, 1, 0.9))[0], 0.0);
  EXPECT_LT(mean_densities(RectModel(1, 1, 1.1))[0], 0.0);
}

TEST(Rescale, HoldsOnGrid) {
  const std::array<double, 5> as{0.5, 1.0, 1.5, 2.0, 3.0};
  const std::array<double, 5> bs{0.25, 0.5, 1.0, 1.25, 2.0};
  const std::array<double, 5> gs{0.1, 0.5, 1.0, 2.0, 4.0};
  for (double a : as)
    for (double b : bs)
      for (double g : gs) {
        const RectModel m(a, b, g);
        for (auto [i, j] : {std::pair{0, 0}, {0, 1}, {0, 2}, {1, 2}, {2, 2}}) {
          EXPECT_LT(rel(cov(m, i, j), rescale(m, i, j)), 1e-12) << a << " " << b << " " << g << " " << i << j;
        }
      }
}

TEST(Rescale, Examples) {
  EXPECT_DOUBLE_EQ(cov(RectModel(2.0, 0.5, 3.0), 2, 2), cov(RectModel(1.0, 1.0, 3.0), 2, 2));
  EXPECT_LT(rel(cov(RectModel(4.0, 1.0, 0.25), 0, 2), cov(RectModel(1.0, 1.0, 1.0), 0, 2)), 1e-12);
  EXPECT_THROW(rescale(RectModel(2.0, 0.5, 1.0), 1, 1), std::invalid_argument);
}

TEST(RectModel, RejectsInvalid) {
  EXPECT_THROW(RectModel(0.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(RectModel(1.0, -1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(RectModel(1.0, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(RectModel(1.0, 1.0, std::nan("")), std::invalid_argument);
}
