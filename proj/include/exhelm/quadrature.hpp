#pragma once

// Quadrature building blocks: Gauss-Legendre rules on [-1,1] (nodes by
// Newton iteration on the Legendre recurrence), symmetric triangle rules
// of algebraic degree 1/2/4/6, and boundary quadrature mapped onto the
// tagged facets of a mesh.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "exhelm/mesh.hpp"

namespace exhelm {

struct Rule1d {
  std::vector<double> points;   // in [-1,1]
  std::vector<double> weights;  // sum to 2
};

inline Rule1d gauss_legendre(int q) {
  if (q < 1 || q > 32) throw std::invalid_argument("gauss_legendre: order must be in [1,32]");
  Rule1d rule;
  rule.points.resize(q);
  rule.weights.resize(q);
  for (int i = 0; i < (q + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (q + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        // one polished step
        p0 = 1.0;
        p1 = x;
        for (int k = 2; k <= q; ++k) {
          const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = q * (x * p1 - p0) / (x * x - 1.0);
        x -= p1 / dp;
        break;
      }
    }
    rule.points[i] = -x;
    rule.points[q - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[q - 1 - i] = w;
  }
  if (q % 2 == 1) rule.points[q / 2] = 0.0;
  return rule;
}

/// Symmetric quadrature on the reference triangle {(0,0),(1,0),(0,1)};
/// weights sum to 1/2.  Exact for polynomials up to the stated degree.
struct TriangleRule {
  std::vector<std::array<double, 3>> bary;  // barycentric coordinates
  std::vector<double> weights;              // include the 1/2 area factor
};

inline TriangleRule triangle_rule(int degree) {
  TriangleRule r;
  auto orbit3 = [&](double a, double w) {
    const double b = 1.0 - 2.0 * a;
    r.bary.push_back({b, a, a});
    r.bary.push_back({a, b, a});
    r.bary.push_back({a, a, b});
    r.weights.insert(r.weights.end(), 3, w * 0.5);
  };
  auto orbit6 = [&](double a, double b, double w) {
    const double c = 1.0 - a - b;
    r.bary.push_back({a, b, c});
    r.bary.push_back({a, c, b});
    r.bary.push_back({b, a, c});
    r.bary.push_back({b, c, a});
    r.bary.push_back({c, a, b});
    r.bary.push_back({c, b, a});
    r.weights.insert(r.weights.end(), 6, w * 0.5);
  };
  if (degree <= 1) {
    r.bary.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
    r.weights.push_back(0.5);
  } else if (degree == 2) {
    orbit3(1.0 / 6, 1.0 / 3);
  } else if (degree <= 4) {
    orbit3(0.445948490915965, 0.223381589678011);
    orbit3(0.091576213509771, 0.109951743655322);
  } else if (degree <= 6) {
    orbit3(0.063089014491502, 0.050844906370207);
    orbit3(0.249286745170910, 0.116786275726379);
    orbit6(0.310352451033785, 0.053145049844816, 0.082851075618374);
  } else {
    throw std::invalid_argument("triangle_rule: degree > 6 not tabulated");
  }
  return r;
}

/// Gauss-Legendre quadrature distributed over the facets of one boundary
/// tag.  Normals follow the mesh convention (out of the domain).
struct BoundaryQuadrature {
  struct Facet {
    int mesh_facet;  // index into Mesh::boundary
    int v0, v1;      // endpoint vertex ids
    double length;
  };

  BoundaryTag tag;
  int points_per_facet = 0;
  std::vector<Facet> facets;
  // flattened per-point data, facet-major, fixed order
  std::vector<Vec2> points;
  std::vector<double> weights;
  std::vector<Vec2> normals;
  std::vector<int> facet_of;    // local facet index per point
  std::vector<double> ref;      // coordinate s in [0,1] along (v0 -> v1)

  std::size_t size() const { return points.size(); }
};

inline BoundaryQuadrature build_quadrature(const Mesh& mesh, BoundaryTag tag, int q) {
  if (q < 1 || q > 32)
    throw std::invalid_argument("build_quadrature: points per facet must be in [1,32]");
  const Rule1d rule = gauss_legendre(q);
  BoundaryQuadrature bq;
  bq.tag = tag;
  bq.points_per_facet = q;
  for (std::size_t i = 0; i < mesh.boundary.size(); ++i) {
    const auto& f = mesh.boundary[i];
    if (f.tag != tag) continue;
    const Vec2 a = mesh.vertices[f.v[0]], b = mesh.vertices[f.v[1]];
    const FacetGeometry geo = mesh.facet_geometry(f);
    const int local = static_cast<int>(bq.facets.size());
    bq.facets.push_back({static_cast<int>(i), f.v[0], f.v[1], geo.length});
    for (int k = 0; k < q; ++k) {
      const double s = 0.5 * (1.0 + rule.points[k]);
      bq.points.push_back(a + s * (b - a));
      bq.weights.push_back(0.5 * geo.length * rule.weights[k]);
      bq.normals.push_back(geo.unit_normal);
      bq.facet_of.push_back(local);
      bq.ref.push_back(s);
    }
  }
  if (bq.facets.empty()) throw std::invalid_argument("build_quadrature: tag has no facets");
  return bq;
}

}  // namespace exhelm
