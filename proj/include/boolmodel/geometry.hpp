// Exact intrinsic volumes of unions of axis-aligned rectangles.
//
// The union is represented on the grid induced by all rectangle edge
// coordinates. A grid cell is covered iff some grain contains it; because
// every grain has positive width in both directions, a grid edge or vertex
// lies in the closed union iff one of its incident cells is covered. The
// Euler characteristic is then V - E + F of the covered subcomplex.
//
// On the flat torus the grains are folded into [0,L)^2 and copies shifted
// by {-L,0,L}^2 are clipped to the fundamental square, so the same grid
// machinery applies with periodic index arithmetic.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "boolmodel/types.hpp"

namespace boolmodel {

class UnionComplex {
 public:
  UnionComplex() = default;

  const Domain& domain() const { return domain_; }
  bool periodic() const { return domain_.kind == DomainKind::Torus; }
  /// True when built by window clipping: coordinates start at 0 and end at L.
  bool clipped() const { return clipped_; }

  /// Sorted distinct grid coordinates. On the torus these lie in [0, L)
  /// and always contain 0; the column past the last one closes at L.
  std::span<const double> xs() const { return xs_; }
  std::span<const double> ys() const { return ys_; }

  std::size_t cell_cols() const { return periodic() ? xs_.size() : (xs_.empty() ? 0 : xs_.size() - 1); }
  std::size_t cell_rows() const { return periodic() ? ys_.size() : (ys_.empty() ? 0 : ys_.size() - 1); }
  std::size_t vertex_cols() const { return xs_.size(); }
  std::size_t vertex_rows() const { return ys_.size(); }

  /// Coordinate of vertex column i, with i == xs().size() mapping to L on
  /// the torus.
  double x_at(std::size_t i) const { return i < xs_.size() ? xs_[i] : domain_.L; }
  double y_at(std::size_t j) const { return j < ys_.size() ? ys_[j] : domain_.L; }

  bool cell_covered(std::ptrdiff_t i, std::ptrdiff_t j) const {
    const auto nc = static_cast<std::ptrdiff_t>(cell_cols());
    const auto nr = static_cast<std::ptrdiff_t>(cell_rows());
    if (nc == 0 || nr == 0) return false;
    if (periodic()) {
      i = ((i % nc) + nc) % nc;
      j = ((j % nr) + nr) % nr;
    } else if (i < 0 || j < 0 || i >= nc || j >= nr) {
      return false;
    }
    return cells_[static_cast<std::size_t>(j * nc + i)] != 0;
  }

  bool vertex_covered(std::ptrdiff_t i, std::ptrdiff_t j) const {
    return cell_covered(i - 1, j - 1) || cell_covered(i, j - 1) ||
           cell_covered(i - 1, j) || cell_covered(i, j);
  }
  /// Edge from vertex (i, j) to (i + 1, j).
  bool hedge_covered(std::ptrdiff_t i, std::ptrdiff_t j) const {
    return cell_covered(i, j - 1) || cell_covered(i, j);
  }
  /// Edge from vertex (i, j) to (i, j + 1).
  bool vedge_covered(std::ptrdiff_t i, std::ptrdiff_t j) const {
    return cell_covered(i - 1, j) || cell_covered(i, j);
  }

  std::size_t covered_cell_count() const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
  }

 private:
  friend UnionComplex build_complex_impl(std::span<const PlacedGrain>, Domain, bool);

  Domain domain_{};
  bool clipped_ = false;
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<std::uint8_t> cells_;
};

namespace detail {

struct Interval {
  double lo;
  double hi;
};

// Pieces of [c - h, c + h] (folded to c in [0, L)) that meet [0, L],
// taken over the shifts {-L, 0, L}.
inline void torus_pieces(double c, double h, double L, std::vector<Interval>& out) {
  out.clear();
  const double lo = c - h;
  const double hi = c + h;
  for (double s : {-L, 0.0, L}) {
    const double a = std::max(lo + s, 0.0);
    const double b = std::min(hi + s, L);
    if (a < b) out.push_back({a, b});
  }
}

inline double fold(double v, double L) {
  double r = v - L * std::floor(v / L);
  if (r >= L) r = 0.0;
  return r;
}

inline void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

inline std::size_t index_of(const std::vector<double>& coords, double v) {
  return static_cast<std::size_t>(std::lower_bound(coords.begin(), coords.end(), v) -
                                  coords.begin());
}

}  // namespace detail

inline UnionComplex build_complex_impl(std::span<const PlacedGrain> grains, Domain domain,
                                       bool clip_window) {
  if (!(domain.L > 0.0) || !std::isfinite(domain.L)) {
    throw std::invalid_argument("domain side L must be positive");
  }
  const bool torus = domain.kind == DomainKind::Torus;
  const double L = domain.L;

  struct Box {
    detail::Interval x, y;
  };
  std::vector<Box> boxes;
  boxes.reserve(grains.size() * (torus ? 4 : 1));
  std::vector<detail::Interval> px, py;

  for (std::size_t k = 0; k < grains.size(); ++k) {
    const PlacedGrain& g = grains[k];
    check_grain(g, k);
    if (!g.aligned()) {
      throw std::invalid_argument("grain " + std::to_string(k) +
                                  ": the grid engine requires theta == 0");
    }
    if (torus) {
      if (!(2.0 * g.hx < L) || !(2.0 * g.hy < L)) {
        throw std::invalid_argument("grain " + std::to_string(k) +
                                    ": side length must be smaller than the torus side L");
      }
      detail::torus_pieces(detail::fold(g.cx, L), g.hx, L, px);
      detail::torus_pieces(detail::fold(g.cy, L), g.hy, L, py);
      for (const auto& ix : px)
        for (const auto& iy : py) boxes.push_back({ix, iy});
    } else {
      detail::Interval ix{g.cx - g.hx, g.cx + g.hx};
      detail::Interval iy{g.cy - g.hy, g.cy + g.hy};
      if (clip_window) {
        ix = {std::max(ix.lo, 0.0), std::min(ix.hi, L)};
        iy = {std::max(iy.lo, 0.0), std::min(iy.hi, L)};
        if (!(ix.lo < ix.hi) || !(iy.lo < iy.hi)) continue;
      }
      boxes.push_back({ix, iy});
    }
  }

  UnionComplex c;
  c.domain_ = domain;
  c.clipped_ = clip_window && !torus;

  std::vector<double> xs, ys;
  xs.reserve(2 * boxes.size() + 2);
  ys.reserve(2 * boxes.size() + 2);
  for (const Box& b : boxes) {
    xs.push_back(b.x.lo);
    xs.push_back(b.x.hi);
    ys.push_back(b.y.lo);
    ys.push_back(b.y.hi);
  }
  if (torus || c.clipped_) {
    for (auto* v : {&xs, &ys}) {
      v->push_back(0.0);
      v->push_back(L);
    }
  }
  detail::sort_unique(xs);
  detail::sort_unique(ys);

  // Cells span consecutive entries of xs/ys; on the torus the trailing L
  // closes the last column and is then dropped from the stored arrays.
  const std::size_t ncx = xs.empty() ? 0 : xs.size() - 1;
  const std::size_t ncy = ys.empty() ? 0 : ys.size() - 1;
  c.cells_.assign(ncx * ncy, 0);
  if (ncx > 0 && ncy > 0) {
    std::vector<std::int32_t> diff((ncx + 1) * (ncy + 1), 0);
    const std::size_t stride = ncx + 1;
    for (const Box& b : boxes) {
      const std::size_t i0 = detail::index_of(xs, b.x.lo);
      const std::size_t i1 = detail::index_of(xs, b.x.hi);
      const std::size_t j0 = detail::index_of(ys, b.y.lo);
      const std::size_t j1 = detail::index_of(ys, b.y.hi);
      diff[j0 * stride + i0] += 1;
      diff[j0 * stride + i1] -= 1;
      diff[j1 * stride + i0] -= 1;
      diff[j1 * stride + i1] += 1;
    }
    for (std::size_t j = 0; j < ncy; ++j) {
      std::int32_t run = 0;
      for (std::size_t i = 0; i < ncx; ++i) {
        run += diff[j * stride + i];
        const std::int32_t above = j > 0 ? diff[(j - 1) * stride + i] : 0;
        diff[j * stride + i] = run + above;
        c.cells_[j * ncx + i] = diff[j * stride + i] > 0 ? 1 : 0;
      }
    }
  }
  if (torus) {
    xs.pop_back();
    ys.pop_back();
  }
  c.xs_ = std::move(xs);
  c.ys_ = std::move(ys);
  return c;
}

/// Builds the covered cell complex of the union of aligned grains on the
/// plane or on the torus of side domain.L.
inline UnionComplex build_complex(std::span<const PlacedGrain> grains, Domain domain) {
  return build_complex_impl(grains, domain, false);
}

/// Intrinsic volumes (and the axis-resolved boundary halves) of the union
/// stored in a complex. For clipped complexes, boundary edges lying on the
/// window boundary are counted only with WindowBoundary::Include.
inline FunctionalVector intrinsic_volumes(const UnionComplex& c,
                                          WindowBoundary mode = WindowBoundary::Exclude) {
  FunctionalVector out;
  const auto ncx = static_cast<std::ptrdiff_t>(c.cell_cols());
  const auto ncy = static_cast<std::ptrdiff_t>(c.cell_rows());
  if (ncx == 0 || ncy == 0) {
    out.b_e1 = 0.0;
    out.b_e2 = 0.0;
    return out;
  }
  const auto nvx = static_cast<std::ptrdiff_t>(c.vertex_cols());
  const auto nvy = static_cast<std::ptrdiff_t>(c.vertex_rows());
  const bool window_edges = c.clipped() && mode == WindowBoundary::Exclude;

  std::int64_t faces = 0, edges = 0, vertices = 0;
  double area = 0.0, vertical = 0.0, horizontal = 0.0;

  for (std::ptrdiff_t j = 0; j < ncy; ++j) {
    const double dy = c.y_at(static_cast<std::size_t>(j + 1)) - c.y_at(static_cast<std::size_t>(j));
    for (std::ptrdiff_t i = 0; i < ncx; ++i) {
      if (c.cell_covered(i, j)) {
        ++faces;
        area += (c.x_at(static_cast<std::size_t>(i + 1)) - c.x_at(static_cast<std::size_t>(i))) * dy;
      }
    }
  }
  for (std::ptrdiff_t j = 0; j < nvy; ++j) {
    for (std::ptrdiff_t i = 0; i < nvx; ++i) {
      if (c.vertex_covered(i, j)) ++vertices;
    }
  }
  // Horizontal edges (normal +-e2).
  for (std::ptrdiff_t j = 0; j < nvy; ++j) {
    const bool on_window = window_edges && (j == 0 || j == nvy - 1);
    for (std::ptrdiff_t i = 0; i < ncx; ++i) {
      const bool below = c.cell_covered(i, j - 1);
      const bool above = c.cell_covered(i, j);
      if (!below && !above) continue;
      ++edges;
      if (below != above && !on_window) {
        horizontal += c.x_at(static_cast<std::size_t>(i + 1)) - c.x_at(static_cast<std::size_t>(i));
      }
    }
  }
  // Vertical edges (normal +-e1).
  for (std::ptrdiff_t j = 0; j < ncy; ++j) {
    const double dy = c.y_at(static_cast<std::size_t>(j + 1)) - c.y_at(static_cast<std::size_t>(j));
    for (std::ptrdiff_t i = 0; i < nvx; ++i) {
      const bool left = c.cell_covered(i - 1, j);
      const bool right = c.cell_covered(i, j);
      if (!left && !right) continue;
      ++edges;
      const bool on_window = window_edges && (i == 0 || i == nvx - 1);
      if (left != right && !on_window) vertical += dy;
    }
  }

  out.v0 = vertices - edges + faces;
  out.v2 = area;
  out.b_e1 = 0.5 * vertical;
  out.b_e2 = 0.5 * horizontal;
  out.v1 = *out.b_e1 + *out.b_e2;
  return out;
}

/// Functionals of (union of grains) intersected with [0, L]^2, the
/// minus-sampling measurement. Every grain must have circumradius <= margin.
inline FunctionalVector clip_to_window(std::span<const PlacedGrain> grains, double L,
                                       double margin,
                                       WindowBoundary mode = WindowBoundary::Exclude) {
  for (std::size_t k = 0; k < grains.size(); ++k) {
    if (grains[k].circumradius() > margin) {
      throw std::invalid_argument("grain " + std::to_string(k) +
                                  ": circumradius exceeds the sampling margin");
    }
  }
  return intrinsic_volumes(build_complex_impl(grains, Domain::plane(L), true), mode);
}

}  // namespace boolmodel
