#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "boolmodel/stats.hpp"

using namespace boolmodel;
using namespace boolmodel::stats;

namespace {

std::vector<Vec3> gaussian_rows(std::size_t M, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<Vec3> x(M);
  for (auto& r : x) {
    const double z0 = n(rng), z1 = n(rng), z2 = n(rng);
    r = {z0, 0.5 * z0 + z1, 100.0 + z2 - z0};
  }
  return x;
}

}  // namespace

TEST(EstimateCov, ConstantInputsGiveZero) {
  const std::vector<Vec3> x(50, Vec3{3.0, 1e8 + 0.1, -2.5});
  const auto e = estimate_cov(x, 16.0, 50);
  EXPECT_TRUE((e.cov.array() == 0.0).all());
  EXPECT_TRUE((e.se.array() == 0.0).all());
}

TEST(EstimateCov, TextbookVariance) {
  const std::vector<Vec3> x{{1, 1, 1}, {2, 2, 2}, {3, 3, 3}};
  const auto e = estimate_cov(x, 1.0, 0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(e.cov(i, j), 1.0);
  EXPECT_DOUBLE_EQ(e.mean(0), 2.0);
}

TEST(EstimateCov, RejectsTooFewSamples) {
  const std::vector<Vec3> x{{1, 1, 1}};
  EXPECT_THROW(estimate_cov(x, 1.0), std::invalid_argument);
}

TEST(EstimateCov, BootstrapStandardErrorOfMean) {
  const auto x = gaussian_rows(10000, 1);
  const auto e = estimate_cov(x, 1.0, 1000);
  EXPECT_NEAR(e.mean_se(0), 0.01, 0.0015);
  EXPECT_TRUE((e.se.array() >= 0.0).all());
  EXPECT_TRUE(e.cov.isApprox(e.cov.transpose(), 0.0));
}

TEST(EstimateCov, Invariances) {
  auto x = gaussian_rows(500, 2);
  const auto e0 = estimate_cov(x, 4.0, 100, 9);
  auto y = x;
  std::reverse(y.begin(), y.end());
  const auto e1 = estimate_cov(y, 4.0, 0);
  EXPECT_TRUE(e1.cov.isApprox(e0.cov, 1e-12));
  for (auto& r : y) r[1] += 1e6;
  EXPECT_TRUE(estimate_cov(y, 4.0, 0).cov.isApprox(e0.cov, 1e-9));
  auto z = x;
  for (auto& r : z) r[2] *= 3.0;
  const auto e2 = estimate_cov(z, 4.0, 0);
  EXPECT_NEAR(e2.cov(2, 2), 9.0 * e0.cov(2, 2), 1e-12 * e2.cov(2, 2));
  const auto e3 = estimate_cov(x, 4.0, 100, 9);
  EXPECT_TRUE(e3.se == e0.se);
}

TEST(EstimateCov, AreaDivides) {
  const auto x = gaussian_rows(100, 3);
  EXPECT_TRUE(estimate_cov(x, 16.0, 0).cov.isApprox(estimate_cov(x, 1.0, 0).cov / 16.0, 1e-14));
}

TEST(Standardize, MeanZeroVarianceOne) {
  const auto x = gaussian_rows(1000, 4);
  const auto z = standardize(x);
  for (std::size_t i = 0; i < 3; ++i) {
    double s = 0.0, s2 = 0.0;
    for (const auto& r : z) s += r[i];
    const double m = s / 1000.0;
    for (const auto& r : z) s2 += (r[i] - m) * (r[i] - m);
    EXPECT_NEAR(m, 0.0, 1e-12);
    EXPECT_NEAR(s2 / 999.0, 1.0, 1e-12);
  }
  auto y = x;
  for (auto& r : y) r = {2.0 * r[0] - 7.0, 0.1 * r[1] + 3.0, 5.0 * r[2]};
  const auto zy = standardize(y);
  for (std::size_t k = 0; k < z.size(); ++k)
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(zy[k][i], z[k][i], 1e-9);
}

TEST(Standardize, RejectsDegenerateComponent) {
  std::vector<Vec3> x{{1, 2, 3}, {2, 2, 4}, {3, 2, 5}};
  try {
    standardize(x);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("v1"), std::string::npos);
  }
}

TEST(Histogram, SingleValue) {
  const std::vector<double> v{0.3};
  const auto h = histogram(v);
  EXPECT_EQ(h.bins(), 40u);
  EXPECT_DOUBLE_EQ(h.width(), 0.25);
  double total = 0.0;
  for (double w : h.weights) total += w;
  EXPECT_DOUBLE_EQ(total, 1.0 / 0.25);
  EXPECT_EQ(*std::max_element(h.weights.begin(), h.weights.end()), 4.0);
}

TEST(Histogram, UniformIsFlat) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<double> v(400000);
  for (auto& x : v) x = u(rng);
  const auto h = histogram(v);
  // Each bin holds 10^4 expected counts: weight 0.1 with relative spread 1%.
  for (double w : h.weights) EXPECT_NEAR(w, 0.1, 0.005);
  double integral = 0.0;
  for (double w : h.weights) integral += w * h.width();
  EXPECT_NEAR(integral, 1.0, 1e-12);
}

TEST(Histogram, Overflow) {
  const std::vector<double> v{-6.0, 0.0, 7.0, 5.0};
  const auto h = histogram(v);
  EXPECT_EQ(h.below, 1u);
  EXPECT_EQ(h.above, 1u);
  EXPECT_EQ(h.overflow(), 2u);
  EXPECT_EQ(h.counts.back(), 1u);
  EXPECT_THROW(histogram(v, 1.0, 1.0, 10), std::invalid_argument);
}

TEST(KS, Cases) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(1000000);
  for (auto& x : v) x = n(rng);
  EXPECT_LT(ks_normal(v), 0.002);
  EXPECT_NEAR(ks_normal(std::vector<double>(10, 0.0)), 0.5, 1e-15);
  for (auto& x : v) x += 5.0;
  // Sup distance between N(5, 1) and N(0, 1) is 2 Phi(2.5) - 1.
  EXPECT_NEAR(ks_normal(v), 0.98758067, 0.002);
  EXPECT_THROW(ks_normal(std::vector<double>{}), std::invalid_argument);
}
