#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/multi_point.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include "sspc/errors.hpp"
#include "sspc/phase_space.hpp"
#include "sspc/symbol.hpp"

namespace sspc {

/// Rectangular lattice over phase space, endpoints included on every axis.
struct RangeLattice {
  std::vector<double> x_lo, x_hi, xi_lo, xi_hi;
  std::vector<int> x_count, xi_count;

  static RangeLattice plane(double xlo, double xhi, int nx, double xilo, double xihi, int nxi) {
    return RangeLattice{{xlo}, {xhi}, {xilo}, {xihi}, {nx}, {nxi}};
  }

  std::size_t dim() const noexcept { return x_lo.size(); }

  std::size_t size() const {
    std::size_t total = 1;
    for (std::size_t j = 0; j < dim(); ++j)
      total *= static_cast<std::size_t>(std::max(0, x_count[j])) * static_cast<std::size_t>(std::max(0, xi_count[j]));
    return total;
  }
};

/// Image of a lattice under p with its hull and estimated boundary.
struct RangeSample {
  std::vector<complex> samples;
  std::vector<complex> hull;                      // convex hull, closed polyline
  std::vector<std::vector<complex>> boundary;     // alpha-shape boundary loops, each closed
  double alpha = 0.0;                             // circumradius cut-off used for the boundary
};

namespace detail {

struct Pt {
  double x, y;
};

inline double circumradius2(const Pt& a, const Pt& b, const Pt& c, Pt* center) {
  const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
  if (d == 0.0) return std::numeric_limits<double>::infinity();
  const double a2 = a.x * a.x + a.y * a.y, b2 = b.x * b.x + b.y * b.y, c2 = c.x * c.x + c.y * c.y;
  const Pt o{(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
             (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
  if (center) *center = o;
  return (a.x - o.x) * (a.x - o.x) + (a.y - o.y) * (a.y - o.y);
}

/// Bowyer-Watson triangulation; returns triangles as index triples into `pts`.
inline std::vector<std::array<int, 3>> delaunay(const std::vector<Pt>& pts) {
  struct Tri {
    std::array<int, 3> v;
    Pt c;
    double r2;
  };
  const int n = static_cast<int>(pts.size());
  if (n < 3) return {};
  double xmin = pts[0].x, xmax = xmin, ymin = pts[0].y, ymax = ymin;
  for (const auto& p : pts) {
    xmin = std::min(xmin, p.x), xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y), ymax = std::max(ymax, p.y);
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-300});
  const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
  std::vector<Pt> all(pts);
  all.push_back({cx - 20.0 * span, cy - 10.0 * span});
  all.push_back({cx + 20.0 * span, cy - 10.0 * span});
  all.push_back({cx, cy + 20.0 * span});

  auto make = [&](int a, int b, int c) {
    Tri t{{a, b, c}, {}, 0.0};
    t.r2 = circumradius2(all[a], all[b], all[c], &t.c);
    return t;
  };
  std::vector<Tri> tris{make(n, n + 1, n + 2)};
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    const Pt& p = all[i];
    edges.clear();
    std::vector<Tri> keep;
    keep.reserve(tris.size() + 2);
    for (const auto& t : tris) {
      const double d2 = (p.x - t.c.x) * (p.x - t.c.x) + (p.y - t.c.y) * (p.y - t.c.y);
      if (d2 < t.r2) {
        edges.emplace_back(std::min(t.v[0], t.v[1]), std::max(t.v[0], t.v[1]));
        edges.emplace_back(std::min(t.v[1], t.v[2]), std::max(t.v[1], t.v[2]));
        edges.emplace_back(std::min(t.v[2], t.v[0]), std::max(t.v[2], t.v[0]));
      } else {
        keep.push_back(t);
      }
    }
    std::sort(edges.begin(), edges.end());
    for (std::size_t e = 0; e < edges.size();) {
      std::size_t f = e + 1;
      while (f < edges.size() && edges[f] == edges[e]) ++f;
      if (f - e == 1) keep.push_back(make(edges[e].first, edges[e].second, i));
      e = f;
    }
    tris.swap(keep);
  }
  std::vector<std::array<int, 3>> out;
  for (const auto& t : tris)
    if (t.v[0] < n && t.v[1] < n && t.v[2] < n && std::isfinite(t.r2)) out.push_back(t.v);
  return out;
}

/// Chains undirected boundary edges into closed loops.
inline std::vector<std::vector<int>> chain_loops(std::vector<std::pair<int, int>> edges) {
  std::multimap<int, int> adj;
  for (const auto& [a, b] : edges) {
    adj.emplace(a, b);
    adj.emplace(b, a);
  }
  auto take = [&](int a, int b) {
    for (auto [lo, hi] = adj.equal_range(a); lo != hi; ++lo)
      if (lo->second == b) {
        adj.erase(lo);
        break;
      }
  };
  std::vector<std::vector<int>> loops;
  while (!adj.empty()) {
    const int start = adj.begin()->first;
    std::vector<int> loop{start};
    int cur = start;
    while (true) {
      auto it = adj.find(cur);
      if (it == adj.end()) break;
      const int next = it->second;
      adj.erase(it);
      take(next, cur);
      loop.push_back(next);
      cur = next;
      if (cur == start) break;
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

}  // namespace detail

/// Convex hull of complex samples as a closed polyline (Boost.Geometry).
inline std::vector<complex> convex_hull(const std::vector<complex>& samples) {
  namespace bg = boost::geometry;
  using BPoint = bg::model::d2::point_xy<double>;
  if (samples.empty()) return {};
  bg::model::multi_point<BPoint> mp;
  for (const auto& s : samples) mp.emplace_back(s.real(), s.imag());
  bg::model::polygon<BPoint> hull;
  bg::convex_hull(mp, hull);
  std::vector<complex> out;
  for (const auto& p : hull.outer()) out.emplace_back(p.x(), p.y());
  if (out.empty()) out.push_back(samples.front());
  return out;
}

/// Boundary of a planar point cloud by alpha shape: Delaunay triangles with circumradius <= alpha.
inline std::vector<std::vector<complex>> alpha_boundary(const std::vector<complex>& cloud, double alpha) {
  std::vector<detail::Pt> pts;
  pts.reserve(cloud.size());
  double scale = 0.0;
  for (const auto& c : cloud) scale = std::max({scale, std::abs(c.real()), std::abs(c.imag())});
  scale = std::max(scale, 1.0);
  // deterministic sub-ulp-scale jitter breaks the cocircular ties lattice images produce
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  auto jitter = [&] {
    state ^= state << 13, state ^= state >> 7, state ^= state << 17;
    return (static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5) * 1e-9 * scale;
  };
  for (const auto& c : cloud) pts.push_back({c.real() + jitter(), c.imag() + jitter()});
  const auto tris = detail::delaunay(pts);
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : tris) {
    if (detail::circumradius2(pts[t[0]], pts[t[1]], pts[t[2]], nullptr) > alpha * alpha) continue;
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  }
  std::vector<std::pair<int, int>> edges;
  for (const auto& [e, c] : count)
    if (c == 1) edges.push_back(e);
  std::vector<std::vector<complex>> loops;
  for (const auto& loop : detail::chain_loops(edges)) {
    std::vector<complex> poly;
    for (int i : loop) poly.push_back(cloud[static_cast<std::size_t>(i)]);
    loops.push_back(std::move(poly));
  }
  return loops;
}

/// Samples p over the lattice; boundary estimated by a 2-D alpha shape of the image.
///
/// When `alpha` is not given it is 2.5 times the mean sample spacing of the image's
/// bounding box. Clouds above 6000 distinct points are thinned on an alpha/2 grid first.
inline RangeSample range_sample(const Symbol& sym, const RangeLattice& lat, std::optional<double> alpha = {}) {
  const std::size_t n = sym.dim();
  if (lat.dim() != n || lat.x_hi.size() != n || lat.xi_lo.size() != n || lat.xi_hi.size() != n ||
      lat.x_count.size() != n || lat.xi_count.size() != n)
    throw ArgumentError("range_sample: lattice dimension does not match the symbol");
  if (lat.size() == 0) throw ArgumentError("range_sample: empty lattice");
  if (lat.size() > 4'000'000) throw ArgumentError("range_sample: lattice exceeds 4e6 nodes");

  std::vector<int> counts;
  std::vector<double> lo, hi;
  for (std::size_t j = 0; j < n; ++j) counts.push_back(lat.x_count[j]), lo.push_back(lat.x_lo[j]), hi.push_back(lat.x_hi[j]);
  for (std::size_t j = 0; j < n; ++j) counts.push_back(lat.xi_count[j]), lo.push_back(lat.xi_lo[j]), hi.push_back(lat.xi_hi[j]);

  RangeSample out;
  out.samples.reserve(lat.size());
  std::vector<int> idx(2 * n, 0);
  std::vector<double> coords(2 * n);
  for (std::size_t flat = 0; flat < lat.size(); ++flat) {
    for (std::size_t a = 0; a < 2 * n; ++a)
      coords[a] = counts[a] == 1 ? lo[a] : lo[a] + (hi[a] - lo[a]) * idx[a] / (counts[a] - 1);
    const complex v = sym.eval(PhasePoint::from_stacked(coords));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw EvaluationError("range_sample: non-finite p");
    out.samples.push_back(v);
    for (std::size_t a = 2 * n; a-- > 0;) {
      if (++idx[a] < counts[a]) break;
      idx[a] = 0;
    }
  }

  double scale = 1.0;
  for (const auto& u : out.samples) scale = std::max(scale, std::abs(u));
  // samples closer than 1e-10 * scale are merged; keys are quantized so near-duplicates collide
  const double q = 1e-10 * scale;
  std::map<std::pair<long long, long long>, complex> distinct;
  for (const auto& u : out.samples)
    distinct.emplace(std::pair{std::llround(u.real() / q), std::llround(u.imag() / q)}, u);
  std::vector<complex> uniq;
  uniq.reserve(distinct.size());
  for (const auto& [key, u] : distinct) uniq.push_back(u);

  out.hull = convex_hull(uniq);
  double xmin = uniq[0].real(), xmax = xmin, ymin = uniq[0].imag(), ymax = ymin;
  for (const auto& u : uniq) {
    xmin = std::min(xmin, u.real()), xmax = std::max(xmax, u.real());
    ymin = std::min(ymin, u.imag()), ymax = std::max(ymax, u.imag());
  }
  const double area = (xmax - xmin) * (ymax - ymin);
  if (uniq.size() < 3 || area <= 1e-24 * scale * scale) {
    out.boundary = {out.hull};
    return out;
  }
  out.alpha = alpha ? *alpha : 2.5 * std::sqrt(area / static_cast<double>(uniq.size()));
  if (uniq.size() > 6000) {
    const double cell = out.alpha / 2.0;
    std::map<std::pair<long, long>, complex> thin;
    for (const auto& u : uniq)
      thin.emplace(std::pair{static_cast<long>(std::floor((u.real() - xmin) / cell)),
                             static_cast<long>(std::floor((u.imag() - ymin) / cell))},
                   u);
    uniq.clear();
    for (const auto& [key, u] : thin) uniq.push_back(u);
  }
  out.boundary = alpha_boundary(uniq, out.alpha);
  if (out.boundary.empty()) out.boundary = {out.hull};
  return out;
}

}  // namespace sspc
