#include <gtest/gtest.h>

#include <cmath>

#include "boolmodel/analytic.hpp"
#include "boolmodel/simulate.hpp"

using namespace boolmodel;

namespace {

ModelSpec torus_spec(double gamma, std::size_t M) {
  ModelSpec s;
  s.a = s.b = 1.0;
  s.gamma = gamma;
  s.L = 4.0;
  s.replications = M;
  s.master_seed = 2024;
  return s;
}

bool same(const SampleResult& a, const SampleResult& b) {
  return a.index == b.index && a.grain_count == b.grain_count && a.functionals.v0 == b.functionals.v0 &&
         a.functionals.v1 == b.functionals.v1 && a.functionals.v2 == b.functionals.v2;
}

}  // namespace

TEST(Seeds, SplitMixReference) {
  // First output of the SplitMix64 generator seeded with 0.
  EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFULL);
  EXPECT_NE(stream_seed(1, 0), stream_seed(1, 1));
  EXPECT_NE(stream_seed(1, 0), stream_seed(2, 0));
}

TEST(SampleGrains, Deterministic) {
  auto s = torus_spec(1.0, 1);
  s.orientation = Orientation::Isotropic;
  s.boundary = Boundary::MinusSampling;
  s.margin = 1.0;
  const auto a = sample_grains(s, 17);
  const auto b = sample_grains(s, 17);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].cx, b[k].cx);
    EXPECT_EQ(a[k].cy, b[k].cy);
    EXPECT_EQ(a[k].theta, b[k].theta);
    EXPECT_GE(a[k].theta, 0.0);
    EXPECT_LT(a[k].theta, 3.14159266);
    EXPECT_GE(a[k].cx, -1.0);
    EXPECT_LE(a[k].cx, 5.0);
  }
}

TEST(SampleGrains, SparseLimitIsEmpty) {
  const auto s = torus_spec(1e-12, 1);
  for (std::uint64_t k = 0; k < 100; ++k) EXPECT_TRUE(sample_grains(s, k).empty());
}

TEST(SampleGrains, PoissonMean) {
  const auto s = torus_spec(1.0, 1);
  double sum = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) sum += static_cast<double>(sample_grains(s, static_cast<std::uint64_t>(k)).size());
  EXPECT_NEAR(sum / n, 16.0, 0.13);
}

TEST(Run, EmptyAndWorkerIndependence) {
  EXPECT_TRUE(run(torus_spec(1.0, 0)).empty());
  const auto s = torus_spec(1.0, 500);
  const auto one = run(s, 1);
  const auto eight = run(s, 8);
  ASSERT_EQ(one.size(), 500u);
  ASSERT_EQ(eight.size(), 500u);
  for (std::size_t k = 0; k < one.size(); ++k) {
    EXPECT_EQ(one[k].index, k);
    EXPECT_TRUE(same(one[k], eight[k])) << k;
  }
}

TEST(Run, IsotropicWorkerIndependence) {
  ModelSpec s = torus_spec(1.0, 40);
  s.orientation = Orientation::Isotropic;
  s.boundary = Boundary::MinusSampling;
  s.margin = s.circumradius();
  const auto one = run(s, 1);
  const auto four = run(s, 4);
  for (std::size_t k = 0; k < one.size(); ++k) EXPECT_TRUE(same(one[k], four[k])) << k;
}

TEST(Run, ValidationErrors) {
  auto s = torus_spec(1.0, 10);
  s.L = 2.5;  // diameter sqrt(2) >= L / 2
  EXPECT_THROW(run(s), std::invalid_argument);
  s = torus_spec(1.0, 10);
  s.orientation = Orientation::Isotropic;
  EXPECT_THROW(run(s), std::invalid_argument);
  s = torus_spec(1.0, 10);
  s.boundary = Boundary::MinusSampling;
  s.margin = 0.5;
  EXPECT_THROW(run(s), std::invalid_argument);
  s = torus_spec(-1.0, 10);
  EXPECT_THROW(run(s), std::invalid_argument);
}

TEST(Run, MeanAreaFraction) {
  const auto s = torus_spec(1.0, 20000);
  const auto r = run(s);
  double sum = 0.0, sum2 = 0.0;
  for (const auto& x : r) {
    const double v = x.functionals.v2 / 16.0;
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(r.size());
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / (n - 1.0));
  EXPECT_LT(std::abs(mean - (1.0 - std::exp(-1.0))), 4.0 * se);
}

TEST(Run, MinusSamplingAlignedUsesWindow) {
  ModelSpec s = torus_spec(0.5, 200);
  s.boundary = Boundary::MinusSampling;
  s.margin = s.circumradius();
  for (const auto& r : run(s)) {
    EXPECT_LE(r.functionals.v2, 16.0);
    EXPECT_GE(r.functionals.v2, 0.0);
  }
}
