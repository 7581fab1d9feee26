// Means, covariances with bootstrap errors, standardization, histograms
// and a Kolmogorov-Smirnov distance to the standard normal.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/random/uniform_int_distribution.hpp>

#include "boolmodel/simulate.hpp"

namespace boolmodel::stats {

using Vec3 = std::array<double, 3>;

inline constexpr std::size_t kDefaultBootstrap = 1000;
inline constexpr std::uint64_t kDefaultBootstrapSeed = 0x5EEDB007ULL;

struct CovarianceEstimate {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  /// Bootstrap standard errors of the means.
  Eigen::Vector3d mean_se = Eigen::Vector3d::Zero();
  /// Sample covariance (M - 1 denominator) divided by the window area.
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  /// Bootstrap standard errors of the cov entries.
  Eigen::Matrix3d se = Eigen::Matrix3d::Zero();
  std::size_t M = 0;
  std::size_t B = 0;
};

inline std::vector<Vec3> to_vectors(std::span<const SampleResult> results) {
  std::vector<Vec3> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back(r.functionals.as_array());
  return out;
}

namespace detail {

// Mean and covariance of the rows picked by `pick`, accumulated relative
// to the first sample to avoid cancellation.
template <class Pick>
void moments(std::span<const Vec3> x, std::size_t n, Pick pick, Eigen::Vector3d& mean,
             Eigen::Matrix3d& cov) {
  const Vec3& shift = x[pick(0)];
  std::array<double, 3> s{};
  std::array<double, 6> ss{};
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3& v = x[pick(k)];
    const double d0 = v[0] - shift[0];
    const double d1 = v[1] - shift[1];
    const double d2 = v[2] - shift[2];
    s[0] += d0;
    s[1] += d1;
    s[2] += d2;
    ss[0] += d0 * d0;
    ss[1] += d0 * d1;
    ss[2] += d0 * d2;
    ss[3] += d1 * d1;
    ss[4] += d1 * d2;
    ss[5] += d2 * d2;
  }
  const double dn = static_cast<double>(n);
  for (int i = 0; i < 3; ++i) mean(i) = shift[static_cast<std::size_t>(i)] + s[static_cast<std::size_t>(i)] / dn;
  int idx = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j, ++idx) {
      const double c = (ss[static_cast<std::size_t>(idx)] -
                        s[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(j)] / dn) /
                       (dn - 1.0);
      cov(i, j) = cov(j, i) = c;
    }
  }
}

}  // namespace detail

/// Sample means and covariances over the rows of x; covariances divided
/// by `area`, with B bootstrap resamples for standard errors.
inline CovarianceEstimate estimate_cov(std::span<const Vec3> x, double area,
                                       std::size_t B = kDefaultBootstrap,
                                       std::uint64_t seed = kDefaultBootstrapSeed) {
  const std::size_t M = x.size();
  if (M < 2) throw std::invalid_argument("estimate_cov needs at least 2 samples, got " + std::to_string(M));
  if (!(area > 0.0)) throw std::invalid_argument("estimate_cov: area must be positive");

  CovarianceEstimate est;
  est.M = M;
  est.B = B;
  detail::moments(x, M, [](std::size_t k) { return k; }, est.mean, est.cov);
  // Exact zero for constant data.
  est.cov /= area;
  if (B < 2) return est;

  std::mt19937_64 rng(seed);
  boost::random::uniform_int_distribution<std::size_t> draw(0, M - 1);
  std::vector<std::size_t> picks(M);
  Eigen::Vector3d sum_m = Eigen::Vector3d::Zero(), sum_m2 = Eigen::Vector3d::Zero();
  Eigen::Matrix3d sum_c = Eigen::Matrix3d::Zero(), sum_c2 = Eigen::Matrix3d::Zero();
  Eigen::Vector3d m;
  Eigen::Matrix3d c;
  for (std::size_t rep = 0; rep < B; ++rep) {
    for (auto& p : picks) p = draw(rng);
    detail::moments(x, M, [&](std::size_t k) { return picks[k]; }, m, c);
    c /= area;
    sum_m += m;
    sum_m2 += m.cwiseProduct(m);
    sum_c += c;
    sum_c2 += c.cwiseProduct(c);
  }
  const double dB = static_cast<double>(B);
  auto spread = [dB](double s1, double s2) {
    const double var = (s2 - s1 * s1 / dB) / (dB - 1.0);
    return std::sqrt(std::max(var, 0.0));
  };
  for (int i = 0; i < 3; ++i) {
    est.mean_se(i) = spread(sum_m(i), sum_m2(i));
    for (int j = 0; j < 3; ++j) est.se(i, j) = spread(sum_c(i, j), sum_c2(i, j));
  }
  return est;
}

inline CovarianceEstimate estimate_cov(std::span<const SampleResult> results, double area,
                                       std::size_t B = kDefaultBootstrap,
                                       std::uint64_t seed = kDefaultBootstrapSeed) {
  const auto x = to_vectors(results);
  return estimate_cov(std::span<const Vec3>(x), area, B, seed);
}

/// Standardizes each component to sample mean 0 and sample variance 1.
inline std::vector<Vec3> standardize(std::span<const Vec3> x) {
  if (x.size() < 2) throw std::invalid_argument("standardize needs at least 2 samples");
  Eigen::Vector3d mean;
  Eigen::Matrix3d cov;
  detail::moments(x, x.size(), [](std::size_t k) { return k; }, mean, cov);
  static constexpr std::array<const char*, 3> names{"v0", "v1", "v2"};
  Vec3 scale{};
  for (std::size_t i = 0; i < 3; ++i) {
    const double var = cov(static_cast<int>(i), static_cast<int>(i));
    if (!(var > 0.0)) {
      throw std::invalid_argument(std::string("standardize: component ") + names[i] +
                                  " has zero variance");
    }
    scale[i] = 1.0 / std::sqrt(var);
  }
  std::vector<Vec3> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k)
    for (std::size_t i = 0; i < 3; ++i) out[k][i] = (x[k][i] - mean(static_cast<int>(i))) * scale[i];
  return out;
}

inline std::vector<Vec3> standardize(std::span<const SampleResult> results) {
  const auto x = to_vectors(results);
  return standardize(std::span<const Vec3>(x));
}

inline std::vector<double> component(std::span<const Vec3> x, std::size_t i) {
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k][i];
  return out;
}

struct Histogram {
  double lo = -5.0;
  double hi = 5.0;
  std::vector<double> weights;
  std::vector<std::size_t> counts;
  std::size_t below = 0;
  std::size_t above = 0;
  std::size_t total = 0;

  std::size_t bins() const { return weights.size(); }
  double width() const { return (hi - lo) / static_cast<double>(bins()); }
  double center(std::size_t k) const { return lo + (static_cast<double>(k) + 0.5) * width(); }
  std::size_t overflow() const { return below + above; }
};

/// Histogram with uniform bins on [lo, hi), normalized by the total sample
/// count and the bin width. The last bin is closed at hi.
inline Histogram histogram(std::span<const double> values, double lo = -5.0, double hi = 5.0,
                           std::size_t bins = 40) {
  if (!(hi > lo) || bins == 0) throw std::invalid_argument("histogram: need hi > lo and bins > 0");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(bins, 0);
  h.weights.assign(bins, 0.0);
  h.total = values.size();
  const double w = (hi - lo) / static_cast<double>(bins);
  for (double v : values) {
    if (v < lo) {
      ++h.below;
    } else if (v > hi) {
      ++h.above;
    } else {
      const auto k = std::min(static_cast<std::size_t>((v - lo) / w), bins - 1);
      ++h.counts[k];
    }
  }
  if (h.total > 0) {
    for (std::size_t k = 0; k < bins; ++k)
      h.weights[k] = static_cast<double>(h.counts[k]) / (static_cast<double>(h.total) * w);
  }
  return h;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// sup_x |F_n(x) - Phi(x)|.
inline double ks_normal(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("ks_normal: no values");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = normal_cdf(v[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

}  // namespace boolmodel::stats
