// Intrinsic volumes of unions of arbitrarily rotated rectangles.
//
// All grain edges (and optionally the four sides of a clipping window) are
// split at their mutual intersections into an arrangement stored as a
// half-edge structure. Each half-edge knows how many grains contain the face
// on its left. The union is the closure of the faces of positive depth; its
// Euler characteristic is V - E + F over that closed region, where a face
// with h holes contributes 1 - h, which is the sum of the orientation signs
// of its boundary cycles.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "boolmodel/types.hpp"

namespace boolmodel {

struct ArrangementOptions {
  /// Side of the clipping window [0, L]^2; absent means the whole plane.
  std::optional<double> window;
  /// Relative snapping tolerance; the absolute tolerance is this times the
  /// window side (or the extent of the input when unclipped).
  double relative_tolerance = 1e-9;
};

class Arrangement {
 public:
  struct HalfEdge {
    int origin = -1;
    int next = -1;
  };

  static int twin(int h) { return h ^ 1; }
  static int edge_of(int h) { return h >> 1; }

  std::vector<Point> vertices;
  std::vector<HalfEdge> half_edges;
  /// Per half-edge: number of grains whose interior contains the left face.
  std::vector<int> depth;
  /// Per half-edge: left face belongs to the measured region (depth >= 1 and
  /// inside the window if any).
  std::vector<std::uint8_t> covered;
  /// Per edge: number of grain boundary segments running along it.
  std::vector<int> multiplicity;
  /// Per edge: lies on the window boundary.
  std::vector<std::uint8_t> on_window;
  /// Per half-edge: index of its boundary cycle.
  std::vector<int> cycle_of;
  /// Per cycle: signed area enclosed (positive for counter-clockwise).
  std::vector<double> cycle_area;
  /// Connected components of the edge graph.
  int components = 0;
  /// Depth assignments that disagreed during propagation (0 when the
  /// arrangement is topologically consistent).
  int inconsistencies = 0;
  double tolerance = 0.0;

  std::size_t edge_count() const { return half_edges.size() / 2; }
  int destination(int h) const { return half_edges[static_cast<std::size_t>(twin(h))].origin; }
  double edge_length(std::size_t e) const {
    const auto& a = vertices[static_cast<std::size_t>(half_edges[2 * e].origin)];
    const auto& b = vertices[static_cast<std::size_t>(half_edges[2 * e + 1].origin)];
    return norm(b - a);
  }
};

namespace detail {

struct ConvexQuad {
  std::array<Point, 4> p;
  std::array<Point, 4> n;  // outward unit normals of edge p[k] -> p[k+1]
  std::array<double, 4> c;  // n[k] . x <= c[k] inside
  double xmin, xmax, ymin, ymax;

  explicit ConvexQuad(const std::array<Point, 4>& corners) : p(corners) {
    xmin = ymin = std::numeric_limits<double>::infinity();
    xmax = ymax = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < 4; ++k) {
      const Point d = p[(k + 1) % 4] - p[k];
      const double len = norm(d);
      n[k] = {d.y / len, -d.x / len};
      c[k] = dot(n[k], p[k]);
      xmin = std::min(xmin, p[k].x);
      xmax = std::max(xmax, p[k].x);
      ymin = std::min(ymin, p[k].y);
      ymax = std::max(ymax, p[k].y);
    }
  }

  // Whether the points just left / right of m (relative to direction with
  // left normal nl) are interior, in the limit of vanishing offset.
  void classify(Point m, Point nl, double tol, bool& left, bool& right) const {
    left = right = true;
    for (std::size_t k = 0; k < 4; ++k) {
      const double s = dot(n[k], m) - c[k];
      if (s > tol) {
        left = right = false;
        return;
      }
      if (s >= -tol) {
        const double t = dot(n[k], nl);
        if (t >= 0.0) left = false;
        if (t <= 0.0) right = false;
      }
    }
  }
};

class BucketGrid {
 public:
  BucketGrid(std::span<const ConvexQuad> quads, double pad) {
    if (quads.empty()) return;
    double xmin = quads[0].xmin, xmax = quads[0].xmax;
    double ymin = quads[0].ymin, ymax = quads[0].ymax;
    double size = 0.0;
    for (const auto& q : quads) {
      xmin = std::min(xmin, q.xmin);
      xmax = std::max(xmax, q.xmax);
      ymin = std::min(ymin, q.ymin);
      ymax = std::max(ymax, q.ymax);
      size = std::max({size, q.xmax - q.xmin, q.ymax - q.ymin});
    }
    x0_ = xmin - pad;
    y0_ = ymin - pad;
    h_ = std::max(size + 2.0 * pad, std::max(xmax - xmin, ymax - ymin) / 1024.0);
    nx_ = static_cast<std::size_t>((xmax - xmin + 2.0 * pad) / h_) + 1;
    ny_ = static_cast<std::size_t>((ymax - ymin + 2.0 * pad) / h_) + 1;
    // Two passes into a flat bucket array.
    offsets_.assign(nx_ * ny_ + 1, 0);
    auto for_cells = [&](const ConvexQuad& q, auto&& f) {
      const auto [i0, j0] = cell(q.xmin - pad, q.ymin - pad);
      const auto [i1, j1] = cell(q.xmax + pad, q.ymax + pad);
      for (std::size_t j = j0; j <= j1; ++j)
        for (std::size_t i = i0; i <= i1; ++i) f(j * nx_ + i);
    };
    for (const auto& q : quads) for_cells(q, [&](std::size_t c) { ++offsets_[c + 1]; });
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    items_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t k = 0; k < quads.size(); ++k) {
      for_cells(quads[k], [&](std::size_t c) { items_[fill[c]++] = static_cast<int>(k); });
    }
  }

  std::pair<std::size_t, std::size_t> cell(double x, double y) const {
    auto clampi = [](double v, std::size_t n) {
      if (!(v > 0.0)) return std::size_t{0};
      return std::min(static_cast<std::size_t>(v), n - 1);
    };
    return {clampi((x - x0_) / h_, nx_), clampi((y - y0_) / h_, ny_)};
  }

  std::span<const int> at(std::size_t i, std::size_t j) const {
    const std::size_t c = j * nx_ + i;
    return {items_.data() + offsets_[c], offsets_[c + 1] - offsets_[c]};
  }
  std::span<const int> near(Point p) const {
    if (items_.empty()) return {};
    const auto [i, j] = cell(p.x, p.y);
    return at(i, j);
  }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }

 private:
  double x0_ = 0.0, y0_ = 0.0, h_ = 1.0;
  std::size_t nx_ = 0, ny_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<int> items_;
};

// A vertex on segment `seg` at parameter t.
struct SplitPoint {
  std::uint32_t seg;
  double t;
  int vertex;
};

struct SegmentRef {
  std::uint32_t id;
  Point start;
  Point end;
  int start_vertex;
  int end_vertex;
};

// Records where segments a and b meet. Crossings interior to both get a new
// vertex; touching at an endpoint reuses that endpoint's vertex, and
// collinear overlaps contribute the endpoints of each to the other.
inline void intersect_segments(const SegmentRef& a, const SegmentRef& b, double tol,
                               std::vector<Point>& vertices, std::vector<SplitPoint>& out) {
  if (std::max(a.start.x, a.end.x) < std::min(b.start.x, b.end.x) - tol ||
      std::max(b.start.x, b.end.x) < std::min(a.start.x, a.end.x) - tol ||
      std::max(a.start.y, a.end.y) < std::min(b.start.y, b.end.y) - tol ||
      std::max(b.start.y, b.end.y) < std::min(a.start.y, a.end.y) - tol) {
    return;
  }
  const Point p = a.start;
  const Point q = b.start;
  const Point r = a.end - p;
  const Point s = b.end - q;
  const double lr = norm(r);
  const double ls = norm(s);
  const double rxs = cross(r, s);
  const double et = tol / lr;
  const double eu = tol / ls;
  if (std::abs(rxs) > 1e-12 * lr * ls) {
    const Point qp = q - p;
    const double t = cross(qp, s) / rxs;
    const double u = cross(qp, r) / rxs;
    if (t < -et || t > 1.0 + et || u < -eu || u > 1.0 + eu) return;
    int v = -1;
    if (t <= et) {
      v = a.start_vertex;
    } else if (t >= 1.0 - et) {
      v = a.end_vertex;
    } else if (u <= eu) {
      v = b.start_vertex;
    } else if (u >= 1.0 - eu) {
      v = b.end_vertex;
    } else {
      Point x;
      if (r.y == 0.0 && s.x == 0.0) {
        x = {q.x, p.y};
      } else if (r.x == 0.0 && s.y == 0.0) {
        x = {p.x, q.y};
      } else {
        x = p + t * r;
      }
      v = static_cast<int>(vertices.size());
      vertices.push_back(x);
    }
    out.push_back({a.id, std::clamp(t, 0.0, 1.0), v});
    out.push_back({b.id, std::clamp(u, 0.0, 1.0), v});
    return;
  }
  if (std::abs(cross(q - p, r)) / lr > tol) return;
  const std::array<std::pair<Point, int>, 2> b_ends{{{b.start, b.start_vertex}, {b.end, b.end_vertex}}};
  for (const auto& [e, v] : b_ends) {
    const double t = dot(e - p, r) / (lr * lr);
    if (t > et && t < 1.0 - et) out.push_back({a.id, t, v});
  }
  const std::array<std::pair<Point, int>, 2> a_ends{{{a.start, a.start_vertex}, {a.end, a.end_vertex}}};
  for (const auto& [e, v] : a_ends) {
    const double u = dot(e - q, s) / (ls * ls);
    if (u > eu && u < 1.0 - eu) out.push_back({b.id, u, v});
  }
}

// Union-find representative map merging vertices closer than tol.
inline std::vector<int> snap_vertices(const std::vector<Point>& v, double tol) {
  const auto n = v.size();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      auto& px = parent[static_cast<std::size_t>(x)];
      px = parent[static_cast<std::size_t>(px)];
      x = px;
    }
    return x;
  };
  std::vector<std::pair<double, int>> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = {v[i].x, static_cast<int>(i)};
  std::sort(order.begin(), order.end());
  for (std::size_t i = 0; i < n; ++i) {
    const Point& pi = v[static_cast<std::size_t>(order[i].second)];
    for (std::size_t j = i + 1; j < n && order[j].first - order[i].first <= tol; ++j) {
      if (norm(v[static_cast<std::size_t>(order[j].second)] - pi) <= tol) {
        const int ra = find(order[i].second);
        const int rb = find(order[j].second);
        if (ra != rb) parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) parent[i] = find(static_cast<int>(i));
  return parent;
}

// Stable counting sort of items by key(item) in [0, n_keys), followed by
// ordering each bucket with `less`; buckets are typically tiny.
template <class T, class Key, class Less>
void bucket_sort(std::vector<T>& items, std::size_t n_keys, Key key, Less less) {
  std::vector<std::size_t> offsets(n_keys + 1, 0);
  for (const auto& it : items) ++offsets[key(it) + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<T> out(items.size());
  std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
  for (const auto& it : items) out[fill[key(it)]++] = it;
  for (std::size_t k = 0; k < n_keys; ++k) {
    auto first = out.begin() + static_cast<std::ptrdiff_t>(offsets[k]);
    auto last = out.begin() + static_cast<std::ptrdiff_t>(offsets[k + 1]);
    if (last - first > 1) std::sort(first, last, less);
  }
  items.swap(out);
}

// Monotone substitute for atan2 with range [0, 4).
inline double pseudo_angle(Point d) {
  if (d.y >= 0.0) return d.x >= 0.0 ? d.y / (d.x + d.y) : 1.0 - d.x / (d.y - d.x);
  return d.x < 0.0 ? 2.0 - d.y / (-d.x - d.y) : 3.0 + d.x / (d.x - d.y);
}

}  // namespace detail

/// Builds the arrangement of the boundaries of the grains (and window).
inline Arrangement build_arrangement(std::span<const PlacedGrain> grains,
                                     const ArrangementOptions& options = {}) {
  using detail::ConvexQuad;

  std::vector<ConvexQuad> quads;
  quads.reserve(grains.size());
  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
  double lo_y = lo_x, hi_y = -lo_x;
  for (std::size_t k = 0; k < grains.size(); ++k) {
    check_grain(grains[k], k);
    ConvexQuad q(grains[k].corners());
    if (options.window) {
      const double L = *options.window;
      if (!(q.xmax > 0.0 && q.xmin < L && q.ymax > 0.0 && q.ymin < L)) continue;
    }
    lo_x = std::min(lo_x, q.xmin);
    hi_x = std::max(hi_x, q.xmax);
    lo_y = std::min(lo_y, q.ymin);
    hi_y = std::max(hi_y, q.ymax);
    quads.push_back(q);
  }

  Arrangement arr;
  double scale = 0.0;
  if (options.window) {
    if (!(*options.window > 0.0)) throw std::invalid_argument("window side must be positive");
    scale = *options.window;
  } else if (!quads.empty()) {
    scale = std::max(hi_x - lo_x, hi_y - lo_y);
  }
  if (quads.empty()) return arr;
  const double tol = options.relative_tolerance * scale;
  arr.tolerance = tol;

  for (std::size_t g = 0; g < quads.size(); ++g) {
    for (std::size_t k = 0; k < 4; ++k) {
      if (norm(quads[g].p[(k + 1) % 4] - quads[g].p[k]) <= tol) {
        throw std::invalid_argument("grain " + std::to_string(g) + ": degenerate edge");
      }
    }
  }

  std::optional<ConvexQuad> window;
  if (options.window) {
    const double L = *options.window;
    window.emplace(std::array<Point, 4>{Point{0, 0}, Point{L, 0}, Point{L, L}, Point{0, L}});
  }

  // Segments 4g..4g+3 are the edges of grain g, the last four (if any) the
  // window sides; every polygon is counter-clockwise, interior on the left.
  const std::size_t n_grain_segments = 4 * quads.size();
  const std::size_t n_segments = n_grain_segments + (window ? 4 : 0);
  std::vector<Point> points;
  points.reserve(2 * n_segments);
  for (const auto& q : quads) points.insert(points.end(), q.p.begin(), q.p.end());
  if (window) points.insert(points.end(), window->p.begin(), window->p.end());
  auto segment = [&](std::size_t s) {
    const std::size_t base = s - s % 4;
    const std::size_t next = base + (s + 1) % 4;
    return detail::SegmentRef{static_cast<std::uint32_t>(s), points[s], points[next],
                              static_cast<int>(s), static_cast<int>(next)};
  };

  std::vector<detail::SplitPoint> splits;
  splits.reserve(8 * n_segments);
  for (std::size_t s = 0; s < n_segments; ++s) {
    const auto ref = segment(s);
    splits.push_back({ref.id, 0.0, ref.start_vertex});
    splits.push_back({ref.id, 1.0, ref.end_vertex});
  }

  const detail::BucketGrid grid(quads, tol);
  auto overlap = [&](const ConvexQuad& a, const ConvexQuad& b) {
    return a.xmin <= b.xmax + tol && b.xmin <= a.xmax + tol && a.ymin <= b.ymax + tol &&
           b.ymin <= a.ymax + tol;
  };
  for (std::size_t j = 0; j < grid.ny(); ++j) {
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      const auto bucket = grid.at(i, j);
      for (std::size_t u = 0; u < bucket.size(); ++u) {
        for (std::size_t v = u + 1; v < bucket.size(); ++v) {
          const auto ga = static_cast<std::size_t>(bucket[u]);
          const auto gb = static_cast<std::size_t>(bucket[v]);
          const ConvexQuad& qa = quads[ga];
          const ConvexQuad& qb = quads[gb];
          if (!overlap(qa, qb)) continue;
          // Visit each pair once: in the cell holding the lower-left corner
          // of the padded bounding-box intersection.
          const auto home = grid.cell(std::max(qa.xmin, qb.xmin) - tol, std::max(qa.ymin, qb.ymin) - tol);
          if (home.first != i || home.second != j) continue;
          for (std::size_t ka = 0; ka < 4; ++ka) {
            const auto sa = segment(4 * ga + ka);
            for (std::size_t kb = 0; kb < 4; ++kb) {
              detail::intersect_segments(sa, segment(4 * gb + kb), tol, points, splits);
            }
          }
        }
      }
    }
  }
  if (window) {
    const double L = *options.window;
    for (std::size_t g = 0; g < quads.size(); ++g) {
      const ConvexQuad& q = quads[g];
      if (!(q.xmin <= tol || q.xmax >= L - tol || q.ymin <= tol || q.ymax >= L - tol)) continue;
      for (std::size_t kw = 0; kw < 4; ++kw) {
        const auto sw = segment(n_grain_segments + kw);
        for (std::size_t kg = 0; kg < 4; ++kg) {
          detail::intersect_segments(sw, segment(4 * g + kg), tol, points, splits);
        }
      }
    }
  }

  // Merge near-coincident vertices and compact the ids.
  const std::vector<int> rep = detail::snap_vertices(points, tol);
  std::vector<int> compact(points.size(), -1);
  for (std::size_t v = 0; v < points.size(); ++v) {
    const auto r = static_cast<std::size_t>(rep[v]);
    if (compact[r] < 0) {
      compact[r] = static_cast<int>(arr.vertices.size());
      arr.vertices.push_back(points[r]);
    }
  }
  for (auto& sp : splits) sp.vertex = compact[static_cast<std::size_t>(rep[static_cast<std::size_t>(sp.vertex)])];

  // Sub-edges along each segment, then deduplicated across segments.
  detail::bucket_sort(
      splits, n_segments, [](const detail::SplitPoint& sp) { return std::size_t{sp.seg}; },
      [](const detail::SplitPoint& a, const detail::SplitPoint& b) { return a.t < b.t; });
  struct Piece {
    int lo, hi;
    int grain_delta;   // +1 per grain segment running lo -> hi, -1 for hi -> lo
    int window_delta;
    bool grain;
  };
  std::vector<Piece> pieces;
  pieces.reserve(splits.size());
  for (std::size_t k = 1; k < splits.size(); ++k) {
    const auto& a = splits[k - 1];
    const auto& b = splits[k];
    if (a.seg != b.seg || a.vertex == b.vertex) continue;
    const bool forward = a.vertex < b.vertex;
    const int sign = forward ? 1 : -1;
    const bool is_grain = a.seg < n_grain_segments;
    pieces.push_back({std::min(a.vertex, b.vertex), std::max(a.vertex, b.vertex),
                      is_grain ? sign : 0, is_grain ? 0 : sign, is_grain});
  }
  detail::bucket_sort(
      pieces, arr.vertices.size(), [](const Piece& pc) { return static_cast<std::size_t>(pc.lo); },
      [](const Piece& a, const Piece& b) { return a.hi < b.hi; });
  std::vector<int> grain_delta, window_delta;
  for (std::size_t k = 0; k < pieces.size();) {
    std::size_t m = k;
    int gd = 0, wd = 0, mult = 0;
    bool on_win = false;
    for (; m < pieces.size() && pieces[m].lo == pieces[k].lo && pieces[m].hi == pieces[k].hi; ++m) {
      gd += pieces[m].grain_delta;
      wd += pieces[m].window_delta;
      mult += pieces[m].grain ? 1 : 0;
      on_win = on_win || !pieces[m].grain;
    }
    arr.half_edges.push_back({pieces[k].lo, -1});
    arr.half_edges.push_back({pieces[k].hi, -1});
    arr.multiplicity.push_back(mult);
    arr.on_window.push_back(on_win ? 1 : 0);
    grain_delta.push_back(gd);
    window_delta.push_back(wd);
    k = m;
  }

  const std::size_t ne = arr.edge_count();
  const std::size_t nv = arr.vertices.size();

  // Outgoing half-edges per vertex, sorted counter-clockwise; next(h) is
  // the outgoing edge preceding twin(h) in that order.
  std::vector<int> offsets(nv + 1, 0);
  for (const auto& h : arr.half_edges) ++offsets[static_cast<std::size_t>(h.origin) + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<std::pair<double, int>> outgoing(2 * ne);
  {
    std::vector<int> fill(offsets.begin(), offsets.end() - 1);
    for (std::size_t h = 0; h < 2 * ne; ++h) {
      const auto& he = arr.half_edges[h];
      const Point d = arr.vertices[static_cast<std::size_t>(arr.destination(static_cast<int>(h)))] -
                      arr.vertices[static_cast<std::size_t>(he.origin)];
      outgoing[static_cast<std::size_t>(fill[static_cast<std::size_t>(he.origin)]++)] = {
          detail::pseudo_angle(d), static_cast<int>(h)};
    }
  }
  for (std::size_t v = 0; v < nv; ++v) {
    auto first = outgoing.begin() + offsets[v];
    auto last = outgoing.begin() + offsets[v + 1];
    std::sort(first, last);
    const auto k = static_cast<std::size_t>(last - first);
    for (std::size_t i = 0; i < k; ++i) {
      const int out = first[static_cast<std::ptrdiff_t>(i)].second;
      const int prev = first[static_cast<std::ptrdiff_t>((i + k - 1) % k)].second;
      arr.half_edges[static_cast<std::size_t>(Arrangement::twin(out))].next = prev;
    }
  }

  // Boundary cycles.
  arr.cycle_of.assign(2 * ne, -1);
  std::vector<int> cycle_start;
  for (std::size_t h0 = 0; h0 < 2 * ne; ++h0) {
    if (arr.cycle_of[h0] >= 0) continue;
    const int id = static_cast<int>(arr.cycle_area.size());
    cycle_start.push_back(static_cast<int>(h0));
    double twice_area = 0.0;
    auto h = static_cast<int>(h0);
    do {
      arr.cycle_of[static_cast<std::size_t>(h)] = id;
      const Point a = arr.vertices[static_cast<std::size_t>(arr.half_edges[static_cast<std::size_t>(h)].origin)];
      const Point b = arr.vertices[static_cast<std::size_t>(arr.destination(h))];
      twice_area += cross(a, b);
      h = arr.half_edges[static_cast<std::size_t>(h)].next;
    } while (h != static_cast<int>(h0));
    arr.cycle_area.push_back(0.5 * twice_area);
  }

  // Depth: probe one face per connected component at an edge midpoint, then
  // propagate across edges using the signed grain counts. The window
  // indicator propagates the same way.
  const std::size_t nc = arr.cycle_area.size();
  std::vector<int> cycle_depth(nc, 0), cycle_window(nc, 0);
  std::vector<std::uint8_t> known(nc, 0);
  std::vector<int> queue;
  queue.reserve(nc);
  auto step = [&](int from_he, int to_cycle, int d, int w) {
    const auto c = static_cast<std::size_t>(to_cycle);
    if (known[c]) {
      if (cycle_depth[c] != d || cycle_window[c] != w) ++arr.inconsistencies;
      return;
    }
    (void)from_he;
    known[c] = 1;
    cycle_depth[c] = d;
    cycle_window[c] = w;
    queue.push_back(to_cycle);
  };
  for (std::size_t c0 = 0; c0 < nc; ++c0) {
    if (known[c0]) continue;
    ++arr.components;
    const int h = cycle_start[c0];
    const auto e = static_cast<std::size_t>(Arrangement::edge_of(h));
    const Point a = arr.vertices[static_cast<std::size_t>(arr.half_edges[static_cast<std::size_t>(h)].origin)];
    const Point b = arr.vertices[static_cast<std::size_t>(arr.destination(h))];
    const Point m = 0.5 * (a + b);
    const Point d = (1.0 / norm(b - a)) * (b - a);
    const Point nl{-d.y, d.x};
    int depth = 0;
    for (int g : grid.near(m)) {
      bool l = false, r = false;
      quads[static_cast<std::size_t>(g)].classify(m, nl, tol, l, r);
      depth += l;
    }
    bool win = true;
    if (window) {
      bool r = false;
      window->classify(m, nl, tol, win, r);
    }
    (void)e;
    queue.clear();
    step(h, static_cast<int>(c0), depth, win ? 1 : 0);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const auto c = static_cast<std::size_t>(queue[qi]);
      const int start = cycle_start[c];
      int x = start;
      do {
        const auto edge = static_cast<std::size_t>(Arrangement::edge_of(x));
        // depth(2e) - depth(2e + 1) = grain_delta(e).
        const int sign = (x & 1) ? -1 : 1;
        const int t = Arrangement::twin(x);
        step(x, arr.cycle_of[static_cast<std::size_t>(t)], cycle_depth[c] - sign * grain_delta[edge],
             cycle_window[c] - sign * window_delta[edge]);
        x = arr.half_edges[static_cast<std::size_t>(x)].next;
      } while (x != start);
    }
  }
  arr.depth.resize(2 * ne);
  arr.covered.resize(2 * ne);
  for (std::size_t h = 0; h < 2 * ne; ++h) {
    const auto c = static_cast<std::size_t>(arr.cycle_of[h]);
    arr.depth[h] = cycle_depth[c];
    arr.covered[h] = cycle_depth[c] > 0 && cycle_window[c] > 0;
  }
  return arr;
}

/// Intrinsic volumes of the covered region of an arrangement.
inline FunctionalVector functionals(const Arrangement& arr,
                                    WindowBoundary mode = WindowBoundary::Exclude) {
  FunctionalVector out;
  const std::size_t ne = arr.edge_count();
  std::vector<std::uint8_t> vertex_hit(arr.vertices.size(), 0);
  std::int64_t edges = 0;
  double boundary = 0.0;
  for (std::size_t e = 0; e < ne; ++e) {
    const bool l = arr.covered[2 * e] != 0;
    const bool r = arr.covered[2 * e + 1] != 0;
    if (!l && !r) continue;
    ++edges;
    vertex_hit[static_cast<std::size_t>(arr.half_edges[2 * e].origin)] = 1;
    vertex_hit[static_cast<std::size_t>(arr.half_edges[2 * e + 1].origin)] = 1;
    if (l != r && (mode == WindowBoundary::Include || !arr.on_window[e])) {
      boundary += arr.edge_length(e);
    }
  }
  std::vector<std::uint8_t> seen(arr.cycle_area.size(), 0);
  std::int64_t faces = 0;
  double area = 0.0;
  for (std::size_t h = 0; h < arr.half_edges.size(); ++h) {
    const auto c = static_cast<std::size_t>(arr.cycle_of[h]);
    if (seen[c] || !arr.covered[h]) continue;
    seen[c] = 1;
    area += arr.cycle_area[c];
    faces += arr.cycle_area[c] > 0.0 ? 1 : -1;
  }
  const auto vertices = static_cast<std::int64_t>(std::count(vertex_hit.begin(), vertex_hit.end(), std::uint8_t{1}));
  out.v0 = vertices - edges + faces;
  out.v1 = 0.5 * boundary;
  out.v2 = area;
  return out;
}

/// Intrinsic volumes of the union of (possibly rotated) grains, optionally
/// clipped to the window [0, L]^2.
inline FunctionalVector union_functionals(std::span<const PlacedGrain> grains,
                                          std::optional<double> window = std::nullopt,
                                          WindowBoundary mode = WindowBoundary::Exclude) {
  ArrangementOptions options;
  options.window = window;
  return functionals(build_arrangement(grains, options), mode);
}

}  // namespace boolmodel
