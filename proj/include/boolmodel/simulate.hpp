// Sampling of Boolean-model realizations and the replication runner.
//
// Replication k draws from its own stream seeded with
//   stream_seed(master, k) = splitmix64(master ^ splitmix64(k)),
// so every sample is a function of (master_seed, k) alone and the output
// does not depend on how replications are scheduled across workers.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "boolmodel/arrangement.hpp"
#include "boolmodel/geometry.hpp"
#include "boolmodel/types.hpp"

namespace boolmodel {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index));
}

enum class Orientation { Aligned, Isotropic };
enum class Boundary { TorusPeriodic, MinusSampling };

struct ModelSpec {
  double a = 1.0;
  double b = 1.0;
  double gamma = 1.0;
  Orientation orientation = Orientation::Aligned;
  Boundary boundary = Boundary::TorusPeriodic;
  /// Window / torus side.
  double L = 4.0;
  /// Minus-sampling margin; grains are sampled in [-margin, L + margin]^2.
  double margin = 0.0;
  WindowBoundary window_boundary = WindowBoundary::Exclude;
  std::size_t replications = 0;
  std::uint64_t master_seed = 0;

  double circumradius() const { return 0.5 * std::hypot(a, b); }
  double sampling_side() const {
    return boundary == Boundary::TorusPeriodic ? L : L + 2.0 * margin;
  }
  double window_area() const { return L * L; }
};

inline void validate(const ModelSpec& s) {
  if (!(s.a > 0.0) || !(s.b > 0.0) || !std::isfinite(s.a) || !std::isfinite(s.b)) {
    throw std::invalid_argument("grain sides a, b must be positive");
  }
  if (!(s.gamma > 0.0) || !std::isfinite(s.gamma)) {
    throw std::invalid_argument("intensity gamma must be positive");
  }
  if (!(s.L > 0.0) || !std::isfinite(s.L)) throw std::invalid_argument("window side L must be positive");
  if (s.boundary == Boundary::TorusPeriodic) {
    if (s.orientation != Orientation::Aligned) {
      throw std::invalid_argument("periodic boundaries require aligned grains");
    }
    const double diameter = std::hypot(s.a, s.b);
    if (!(diameter < 0.5 * s.L)) {
      throw std::invalid_argument("grain diameter " + std::to_string(diameter) +
                                  " must be smaller than L/2 = " + std::to_string(0.5 * s.L) +
                                  " for torus-exact covariances");
    }
  } else if (s.margin < s.circumradius()) {
    throw std::invalid_argument("minus-sampling margin " + std::to_string(s.margin) +
                                " is smaller than the grain circumradius " +
                                std::to_string(s.circumradius()));
  }
}

struct SampleResult {
  std::size_t index = 0;
  FunctionalVector functionals;
  std::size_t grain_count = 0;
};

/// Grains of replication `index`.
inline std::vector<PlacedGrain> sample_grains(const ModelSpec& spec, std::uint64_t index) {
  std::mt19937_64 rng(stream_seed(spec.master_seed, index));
  const double side = spec.sampling_side();
  const double lo = spec.boundary == Boundary::TorusPeriodic ? 0.0 : -spec.margin;
  boost::random::poisson_distribution<std::int64_t, double> count(spec.gamma * side * side);
  boost::random::uniform_real_distribution<double> pos(lo, lo + side);
  boost::random::uniform_real_distribution<double> angle(0.0, std::numbers::pi);

  const auto n = static_cast<std::size_t>(count(rng));
  std::vector<PlacedGrain> grains(n);
  for (auto& g : grains) {
    g.cx = pos(rng);
    g.cy = pos(rng);
    g.hx = 0.5 * spec.a;
    g.hy = 0.5 * spec.b;
    g.theta = spec.orientation == Orientation::Isotropic ? angle(rng) : 0.0;
  }
  return grains;
}

/// Intrinsic volumes of one realization under the spec's boundary mode.
inline FunctionalVector measure(const ModelSpec& spec, std::span<const PlacedGrain> grains) {
  if (spec.boundary == Boundary::TorusPeriodic) {
    return intrinsic_volumes(build_complex(grains, Domain::torus(spec.L)));
  }
  if (spec.orientation == Orientation::Aligned) {
    return clip_to_window(grains, spec.L, spec.margin, spec.window_boundary);
  }
  return union_functionals(grains, spec.L, spec.window_boundary);
}

inline SampleResult run_one(const ModelSpec& spec, std::size_t index) {
  const auto grains = sample_grains(spec, index);
  return {index, measure(spec, grains), grains.size()};
}

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Runs spec.replications replications on `workers` threads. Results are
/// stored by index, so the output is identical for any worker count.
inline std::vector<SampleResult> run(const ModelSpec& spec, unsigned workers = default_workers()) {
  validate(spec);
  std::vector<SampleResult> results(spec.replications);
  if (results.empty()) return results;
  workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(std::min<std::size_t>(results.size(), 1024)));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    try {
      for (std::size_t k = next++; k < results.size(); k = next++) results[k] = run_one(spec, k);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = results.size();
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace boolmodel
