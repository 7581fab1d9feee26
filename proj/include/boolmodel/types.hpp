// Core value types shared by the geometry engines, the simulator and the
// statistics layer.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace boolmodel {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::sqrt(a.x * a.x + a.y * a.y); }

/// A closed rectangle with center (cx, cy), half-extents (hx, hy) and
/// orientation theta in [0, pi). theta == 0 means axis-aligned.
struct PlacedGrain {
  double cx = 0.0;
  double cy = 0.0;
  double hx = 0.5;
  double hy = 0.5;
  double theta = 0.0;

  double circumradius() const { return std::hypot(hx, hy); }
  double diameter() const { return 2.0 * circumradius(); }
  bool aligned() const { return theta == 0.0; }

  /// Corners in counter-clockwise order. Aligned grains get exact
  /// cx +- hx, cy +- hy coordinates.
  std::array<Point, 4> corners() const {
    if (aligned()) {
      return {Point{cx - hx, cy - hy}, Point{cx + hx, cy - hy},
              Point{cx + hx, cy + hy}, Point{cx - hx, cy + hy}};
    }
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const std::array<Point, 4> local{Point{-hx, -hy}, Point{hx, -hy},
                                     Point{hx, hy}, Point{-hx, hy}};
    std::array<Point, 4> out{};
    for (std::size_t k = 0; k < 4; ++k) {
      out[k] = {cx + c * local[k].x - s * local[k].y,
                cy + s * local[k].x + c * local[k].y};
    }
    return out;
  }
};

/// Rectangle from explicit closed bounds [x0,x1] x [y0,y1].
inline PlacedGrain grain_from_bounds(double x0, double y0, double x1,
                                     double y1) {
  return {0.5 * (x0 + x1), 0.5 * (y0 + y1), 0.5 * (x1 - x0), 0.5 * (y1 - y0),
          0.0};
}

enum class DomainKind { Plane, Torus };

struct Domain {
  DomainKind kind = DomainKind::Plane;
  double L = 1.0;

  static Domain plane(double side) { return {DomainKind::Plane, side}; }
  static Domain torus(double side) { return {DomainKind::Torus, side}; }
};

/// Whether segments of the union boundary that lie on the window boundary
/// contribute to v1 in clipped (minus-sampling) measurements.
enum class WindowBoundary { Exclude, Include };

/// Intrinsic volumes of a planar set. b_e1 / b_e2 are the halves of the
/// boundary length carried by normals +-e1 (vertical edges) and +-e2
/// (horizontal edges); only the aligned engine fills them.
struct FunctionalVector {
  std::int64_t v0 = 0;
  double v1 = 0.0;
  double v2 = 0.0;
  std::optional<double> b_e1;
  std::optional<double> b_e2;

  std::array<double, 3> as_array() const {
    return {static_cast<double>(v0), v1, v2};
  }
};

inline void check_grain(const PlacedGrain& g, std::size_t index) {
  if (!std::isfinite(g.cx) || !std::isfinite(g.cy) || !std::isfinite(g.hx) ||
      !std::isfinite(g.hy) || !std::isfinite(g.theta)) {
    throw std::invalid_argument("grain " + std::to_string(index) +
                                ": non-finite coordinates");
  }
  if (!(g.hx > 0.0) || !(g.hy > 0.0)) {
    throw std::invalid_argument("grain " + std::to_string(index) +
                                ": half-extents must be positive");
  }
}

}  // namespace boolmodel
