#pragma once

// 2D triangulations of the truncated domain: the scatterer boundary is
// tagged Gamma, the artificial truncation boundary Sigma.  All triangles
// are CCW; facet normals point out of the computational domain (on Gamma
// this is *into* the scatterer).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "exhelm/geometry.hpp"

namespace exhelm {

enum class BoundaryTag { gamma, sigma };

struct BoundaryFacet {
  std::array<int, 2> v;  // endpoint vertex indices
  BoundaryTag tag;
  int tri;  // the unique triangle this edge belongs to
};

struct FacetGeometry {
  Vec2 midpoint;
  Vec2 unit_normal;  // out of the computational domain
  double length;
};

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
// Distance between segments [a0,a1] and [b0,b1].
inline double point_segment_dist(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double len2 = dot(d, d);
  double t = len2 > 0 ? dot(p - a, d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return dist(p, a + t * d);
}

inline bool segments_intersect(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  const double d1 = cross(a1 - a0, b0 - a0);
  const double d2 = cross(a1 - a0, b1 - a0);
  const double d3 = cross(b1 - b0, a0 - b0);
  const double d4 = cross(b1 - b0, a1 - b0);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

inline double segment_segment_dist(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  if (segments_intersect(a0, a1, b0, b1)) return 0.0;
  return std::min(std::min(point_segment_dist(a0, b0, b1), point_segment_dist(a1, b0, b1)),
                  std::min(point_segment_dist(b0, a0, a1), point_segment_dist(b1, a0, a1)));
}
}  // namespace detail

struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryFacet> boundary;

  double signed_area(int t) const {
    const auto& tr = triangles[t];
    const Vec2 a = vertices[tr[0]], b = vertices[tr[1]], c = vertices[tr[2]];
    return 0.5 * cross(b - a, c - a);
  }

  Vec2 centroid(int t) const {
    const auto& tr = triangles[t];
    return (vertices[tr[0]] + vertices[tr[1]] + vertices[tr[2]]) / 3.0;
  }

  FacetGeometry facet_geometry(const BoundaryFacet& f) const {
    const Vec2 a = vertices[f.v[0]], b = vertices[f.v[1]];
    const double len = dist(a, b);
    const Vec2 mid = 0.5 * (a + b);
    Vec2 n = perp_cw(b - a) / len;
    if (dot(n, mid - centroid(f.tri)) < 0) n = -n;
    return {mid, n, len};
  }

  /// Smallest distance between any Gamma facet and any Sigma facet.
  double boundary_separation() const {
    double sep = std::numeric_limits<double>::infinity();
    for (const auto& fg : boundary) {
      if (fg.tag != BoundaryTag::gamma) continue;
      for (const auto& fs : boundary) {
        if (fs.tag != BoundaryTag::sigma) continue;
        sep = std::min(sep, detail::segment_segment_dist(vertices[fg.v[0]], vertices[fg.v[1]],
                                                         vertices[fs.v[0]], vertices[fs.v[1]]));
      }
    }
    return sep;
  }

  /// Enforces the structural invariants; throws MeshError on violation.
  void validate() const {
    const int nv = static_cast<int>(vertices.size());
    for (const auto& t : triangles)
      for (int v : t)
        if (v < 0 || v >= nv) throw MeshError("triangle references vertex " + std::to_string(v));
    for (std::size_t t = 0; t < triangles.size(); ++t)
      if (signed_area(static_cast<int>(t)) <= 0)
        throw MeshError("triangle " + std::to_string(t) + " is not positively oriented");

    // undirected edge -> adjacent triangle count
    std::map<std::pair<int, int>, std::pair<int, int>> edges;  // -> (count, one owner)
    for (std::size_t t = 0; t < triangles.size(); ++t) {
      const auto& tr = triangles[t];
      for (int e = 0; e < 3; ++e) {
        auto key = std::minmax(tr[e], tr[(e + 1) % 3]);
        auto& rec = edges[key];
        rec.first += 1;
        rec.second = static_cast<int>(t);
        if (rec.first > 2) throw MeshError("edge shared by more than two triangles");
      }
    }
    std::map<std::pair<int, int>, int> facet_seen;
    for (const auto& f : boundary) {
      auto key = std::minmax(f.v[0], f.v[1]);
      auto it = edges.find(key);
      if (it == edges.end()) throw MeshError("boundary facet is not a mesh edge");
      if (it->second.first != 1) throw MeshError("boundary facet lies on an interior edge");
      if (f.tri < 0 || f.tri >= static_cast<int>(triangles.size()))
        throw MeshError("boundary facet has invalid triangle reference");
      const auto& tr = triangles[f.tri];
      const bool has0 = tr[0] == f.v[0] || tr[1] == f.v[0] || tr[2] == f.v[0];
      const bool has1 = tr[0] == f.v[1] || tr[1] == f.v[1] || tr[2] == f.v[1];
      if (!has0 || !has1) throw MeshError("boundary facet not an edge of its triangle");
      if (++facet_seen[key] > 1) throw MeshError("duplicate boundary facet");
    }
    for (const auto& [key, rec] : edges)
      if (rec.first == 1 && !facet_seen.count(key))
        throw MeshError("untagged boundary edge (" + std::to_string(key.first) + "," +
                        std::to_string(key.second) + ")");

    // every nonempty tag must consist of closed loops: vertex degrees of 2
    bool has_gamma = false, has_sigma = false;
    for (BoundaryTag tag : {BoundaryTag::gamma, BoundaryTag::sigma}) {
      std::map<int, int> deg;
      int count = 0;
      for (const auto& f : boundary)
        if (f.tag == tag) {
          ++count;
          ++deg[f.v[0]];
          ++deg[f.v[1]];
        }
      (tag == BoundaryTag::gamma ? has_gamma : has_sigma) = count > 0;
      const char* name = tag == BoundaryTag::gamma ? "Gamma" : "Sigma";
      for (const auto& [v, d] : deg)
        if (d != 2)
          throw MeshError(std::string(name) + " loop is not closed at vertex " +
                          std::to_string(v));
    }

    if (has_gamma && has_sigma && !(boundary_separation() > 0))
      throw MeshError("Gamma and Sigma are not separated");
  }
};

/// Maximum circumscribed-circle diameter over all triangles.
inline double mesh_size(const Mesh& mesh) {
  double h = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    const double a = dist(mesh.vertices[tr[1]], mesh.vertices[tr[2]]);
    const double b = dist(mesh.vertices[tr[2]], mesh.vertices[tr[0]]);
    const double c = dist(mesh.vertices[tr[0]], mesh.vertices[tr[1]]);
    h = std::max(h, a * b * c / (2.0 * mesh.signed_area(static_cast<int>(t))));
  }
  return h;
}

/// Structured polar mesh between two concentric circles; the inner polygon
/// is tagged Gamma, the outer Sigma.
inline Mesh generate_annulus(double r_inner, double r_outer, int n_radial, int n_angular) {
  if (!(0 < r_inner && r_inner < r_outer))
    throw std::invalid_argument("generate_annulus: need 0 < r_inner < r_outer");
  if (n_radial < 1 || n_angular < 3)
    throw std::invalid_argument("generate_annulus: need n_radial >= 1, n_angular >= 3");

  Mesh m;
  m.vertices.reserve(static_cast<std::size_t>(n_radial + 1) * n_angular);
  for (int i = 0; i <= n_radial; ++i) {
    const double r = r_inner + (r_outer - r_inner) * i / n_radial;
    for (int j = 0; j < n_angular; ++j) {
      const double th = 2.0 * M_PI * j / n_angular;
      m.vertices.push_back({r * std::cos(th), r * std::sin(th)});
    }
  }
  auto vid = [n_angular](int i, int j) { return i * n_angular + (j % n_angular); };
  for (int i = 0; i < n_radial; ++i)
    for (int j = 0; j < n_angular; ++j) {
      const int a = vid(i, j), b = vid(i, j + 1), c = vid(i + 1, j + 1), d = vid(i + 1, j);
      m.triangles.push_back({a, c, b});
      m.triangles.push_back({a, d, c});
    }
  auto tid = [n_angular](int i, int j, int which) { return 2 * (i * n_angular + j) + which; };
  for (int j = 0; j < n_angular; ++j)
    m.boundary.push_back({{vid(0, j), vid(0, j + 1)}, BoundaryTag::gamma, tid(0, j, 0)});
  for (int j = 0; j < n_angular; ++j)
    m.boundary.push_back(
        {{vid(n_radial, j), vid(n_radial, j + 1)}, BoundaryTag::sigma, tid(n_radial - 1, j, 1)});
  return m;
}

/// Ring mesh between the unit circle (Gamma) and the square
/// [-side/2, side/2]^2 (Sigma).  The square is sampled by equal arc length
/// (n_angular a multiple of 8, so corners land exactly on vertices); each
/// sample connects by a straight blend to the point of the circle at the
/// same polar angle.
inline Mesh generate_square_hole(double side, int n_radial, int n_angular) {
  if (!(side > 2.0))
    throw std::invalid_argument("generate_square_hole: side must exceed the hole diameter 2");
  if (n_radial < 1 || n_angular < 8 || n_angular % 8 != 0)
    throw std::invalid_argument("generate_square_hole: n_angular must be a positive multiple of 8");

  // arc-length position t in [0,1) along the perimeter, CCW from (side/2, 0)
  auto square_point = [side](double t) {
    const double u = t * 4.0;  // side-lengths travelled
    const double hs = 0.5 * side;
    if (u < 0.5) return Vec2{hs, u * side};
    if (u < 1.5) return Vec2{hs - (u - 0.5) * side, hs};
    if (u < 2.5) return Vec2{-hs, hs - (u - 1.5) * side};
    if (u < 3.5) return Vec2{-hs + (u - 2.5) * side, -hs};
    return Vec2{hs, -hs + (u - 3.5) * side};
  };

  Mesh m;
  m.vertices.reserve(static_cast<std::size_t>(n_radial + 1) * n_angular);
  std::vector<Vec2> outer(n_angular), inner(n_angular);
  for (int j = 0; j < n_angular; ++j) {
    outer[j] = square_point(static_cast<double>(j) / n_angular);
    const double th = std::atan2(outer[j].y, outer[j].x);
    inner[j] = {std::cos(th), std::sin(th)};
  }
  for (int i = 0; i <= n_radial; ++i)
    for (int j = 0; j < n_angular; ++j) {
      const double s = static_cast<double>(i) / n_radial;
      m.vertices.push_back(inner[j] + s * (outer[j] - inner[j]));
    }
  auto vid = [n_angular](int i, int j) { return i * n_angular + (j % n_angular); };
  // split each quad along its shorter diagonal (the corner quads are
  // skewed by the perimeter kink); remember who owns the boundary edges
  std::vector<int> gamma_owner(n_angular), sigma_owner(n_angular);
  for (int i = 0; i < n_radial; ++i)
    for (int j = 0; j < n_angular; ++j) {
      const int a = vid(i, j), b = vid(i, j + 1), c = vid(i + 1, j + 1), d = vid(i + 1, j);
      const int t0 = static_cast<int>(m.triangles.size());
      if (dist(m.vertices[a], m.vertices[c]) <= dist(m.vertices[b], m.vertices[d]) + 1e-14) {
        m.triangles.push_back({a, c, b});  // owns inner edge (a,b)
        m.triangles.push_back({a, d, c});  // owns outer edge (d,c)
        if (i == 0) gamma_owner[j] = t0;
        if (i == n_radial - 1) sigma_owner[j] = t0 + 1;
      } else {
        m.triangles.push_back({a, d, b});  // owns inner edge (a,b)
        m.triangles.push_back({d, c, b});  // owns outer edge (d,c)
        if (i == 0) gamma_owner[j] = t0;
        if (i == n_radial - 1) sigma_owner[j] = t0 + 1;
      }
    }
  for (int j = 0; j < n_angular; ++j)
    m.boundary.push_back({{vid(0, j), vid(0, j + 1)}, BoundaryTag::gamma, gamma_owner[j]});
  for (int j = 0; j < n_angular; ++j)
    m.boundary.push_back(
        {{vid(n_radial, j), vid(n_radial, j + 1)}, BoundaryTag::sigma, sigma_owner[j]});
  return m;
}

/// Uniform n x n grid on [-b,b]^2 with the cells inside [-a,a]^2 removed,
/// each remaining cell split into two triangles.  Hole boundary is Gamma,
/// the outer square Sigma.  Polygonal geometry is exact.
inline Mesh generate_square_frame(double a_half, double b_half, int n) {
  if (!(0 < a_half && a_half < b_half))
    throw std::invalid_argument("generate_square_frame: need 0 < a_half < b_half");
  if (n < 2) throw std::invalid_argument("generate_square_frame: n too small");
  const double q = 0.5 * n * (1.0 - a_half / b_half);  // cells between outer and hole
  const int qi = static_cast<int>(std::lround(q));
  if (std::abs(q - qi) > 1e-9 || qi < 1)
    throw std::invalid_argument(
        "generate_square_frame: hole boundary must align with grid lines (a_half/b_half*n and "
        "n*(1-a_half/b_half)/2 must be integers)");

  const double h = 2.0 * b_half / n;
  auto inside_hole = [&](int k, int l) { return k >= qi && k < n - qi && l >= qi && l < n - qi; };

  Mesh m;
  std::vector<int> vmap(static_cast<std::size_t>(n + 1) * (n + 1), -1);
  auto vertex = [&](int k, int l) {
    int& id = vmap[static_cast<std::size_t>(l) * (n + 1) + k];
    if (id < 0) {
      id = static_cast<int>(m.vertices.size());
      m.vertices.push_back({-b_half + k * h, -b_half + l * h});
    }
    return id;
  };

  std::map<std::pair<int, int>, int> edge_owner;  // boundary candidate edges
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) {
      if (inside_hole(k, l)) continue;
      const int v00 = vertex(k, l), v10 = vertex(k + 1, l);
      const int v11 = vertex(k + 1, l + 1), v01 = vertex(k, l + 1);
      m.triangles.push_back({v00, v10, v11});
      m.triangles.push_back({v00, v11, v01});
    }
  // collect edges with a single owner
  std::map<std::pair<int, int>, std::pair<int, int>> edges;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tr = m.triangles[t];
    for (int e = 0; e < 3; ++e) {
      auto key = std::minmax(tr[e], tr[(e + 1) % 3]);
      auto& rec = edges[key];
      rec.first += 1;
      rec.second = static_cast<int>(t);
    }
  }
  const double eps = 1e-9 * b_half;
  for (const auto& [key, rec] : edges) {
    if (rec.first != 1) continue;
    const Vec2 mid = 0.5 * (m.vertices[key.first] + m.vertices[key.second]);
    const double c = std::max(std::abs(mid.x), std::abs(mid.y));
    const BoundaryTag tag =
        std::abs(c - b_half) < eps ? BoundaryTag::sigma : BoundaryTag::gamma;
    m.boundary.push_back({{key.first, key.second}, tag, rec.second});
  }
  return m;
}

}  // namespace exhelm
