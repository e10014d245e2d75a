#pragma once

// Continuous Lagrange elements of degree 1 and 2 on triangles, assembly of
// the local (transmission) operator
//     a_L(u,v) = (grad u, grad v) - kappa^2 (u,v) - i kappa <u,v>_Sigma,
// Neumann load vectors, pointwise evaluation and L2/H1 error norms.
// Volume quadrature is exact for all polynomial integrands that occur, so
// the observed convergence orders are free of variational-crime noise.

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "exhelm/geometry.hpp"
#include "exhelm/mesh.hpp"
#include "exhelm/quadrature.hpp"

namespace exhelm {

struct ComplexCsrMatrix {
  int n = 0;
  std::vector<int> row_offsets;
  std::vector<int> cols;  // strictly increasing within each row
  std::vector<Complex> vals;

  std::size_t nnz() const { return cols.size(); }

  Complex& at(int i, int j) {
    for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
      if (cols[k] == j) return vals[k];
    throw std::logic_error("ComplexCsrMatrix::at: entry outside sparsity pattern");
  }

  void matvec(const Complex* x, Complex* y) const {
    for (int i = 0; i < n; ++i) {
      Complex acc = 0;
      for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k) acc += vals[k] * x[cols[k]];
      y[i] = acc;
    }
  }

  std::vector<Complex> apply(const std::vector<Complex>& x) const {
    std::vector<Complex> y(n);
    matvec(x.data(), y.data());
    return y;
  }
};

class FeSpace {
 public:
  FeSpace(const Mesh& mesh, int degree) : mesh_(&mesh), degree_(degree) {
    if (degree != 1 && degree != 2)
      throw std::invalid_argument("FeSpace: supported degrees are 1 and 2");
    const int nv = static_cast<int>(mesh.vertices.size());
    cell_dofs_.resize(mesh.triangles.size());
    if (degree == 1) {
      n_dofs_ = nv;
      for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tr = mesh.triangles[t];
        cell_dofs_[t] = {tr[0], tr[1], tr[2], -1, -1, -1};
      }
    } else {
      for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tr = mesh.triangles[t];
        std::array<int, 6> dofs = {tr[0], tr[1], tr[2], 0, 0, 0};
        const std::array<std::pair<int, int>, 3> led = {
            std::minmax(tr[0], tr[1]), std::minmax(tr[1], tr[2]), std::minmax(tr[2], tr[0])};
        for (int e = 0; e < 3; ++e) {
          auto [it, inserted] = edge_ids_.emplace(led[e], nv + static_cast<int>(edge_ids_.size()));
          dofs[3 + e] = it->second;
        }
        cell_dofs_[t] = dofs;
      }
      n_dofs_ = nv + static_cast<int>(edge_ids_.size());
    }
  }

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  int n_dofs() const { return n_dofs_; }
  int dofs_per_cell() const { return degree_ == 1 ? 3 : 6; }
  const std::array<int, 6>& cell_dofs(int t) const { return cell_dofs_[t]; }

  Vec2 dof_coord(int dof) const {
    const int nv = static_cast<int>(mesh_->vertices.size());
    if (dof < nv) return mesh_->vertices[dof];
    for (const auto& [edge, id] : edge_ids_)
      if (id == dof) return 0.5 * (mesh_->vertices[edge.first] + mesh_->vertices[edge.second]);
    throw std::out_of_range("FeSpace::dof_coord");
  }

  int dofs_per_facet() const { return degree_ + 1; }

  /// Dofs supported on a boundary facet, ordered (v0, v1[, edge]).
  std::array<int, 3> facet_dofs(const BoundaryFacet& f) const {
    if (degree_ == 1) return {f.v[0], f.v[1], -1};
    return {f.v[0], f.v[1], edge_ids_.at(std::minmax(f.v[0], f.v[1]))};
  }

  /// Facet-restricted basis at s in [0,1] measured from v0 to v1.
  void facet_basis(double s, double* phi) const {
    if (degree_ == 1) {
      phi[0] = 1.0 - s;
      phi[1] = s;
    } else {
      phi[0] = (1.0 - s) * (1.0 - 2.0 * s);
      phi[1] = s * (2.0 * s - 1.0);
      phi[2] = 4.0 * s * (1.0 - s);
    }
  }

  /// Reference basis at barycentric coordinates.
  void cell_basis(const std::array<double, 3>& l, double* phi) const {
    if (degree_ == 1) {
      phi[0] = l[0];
      phi[1] = l[1];
      phi[2] = l[2];
    } else {
      for (int i = 0; i < 3; ++i) phi[i] = l[i] * (2.0 * l[i] - 1.0);
      phi[3] = 4.0 * l[0] * l[1];
      phi[4] = 4.0 * l[1] * l[2];
      phi[5] = 4.0 * l[2] * l[0];
    }
  }

  /// Physical gradients of the basis on cell t at barycentric coordinates.
  void cell_basis_grad(int t, const std::array<double, 3>& l, Vec2* grad) const {
    const auto& tr = mesh_->triangles[t];
    const Vec2 a = mesh_->vertices[tr[0]], b = mesh_->vertices[tr[1]], c = mesh_->vertices[tr[2]];
    const double det = cross(b - a, c - a);
    // physical gradients of the barycentric coordinates
    const Vec2 gl[3] = {perp_cw(b - c) / det, perp_cw(c - a) / det, perp_cw(a - b) / det};
    if (degree_ == 1) {
      grad[0] = gl[0];
      grad[1] = gl[1];
      grad[2] = gl[2];
    } else {
      for (int i = 0; i < 3; ++i) grad[i] = (4.0 * l[i] - 1.0) * gl[i];
      grad[3] = 4.0 * (l[0] * gl[1] + l[1] * gl[0]);
      grad[4] = 4.0 * (l[1] * gl[2] + l[2] * gl[1]);
      grad[5] = 4.0 * (l[2] * gl[0] + l[0] * gl[2]);
    }
  }

  /// Sorted dofs supported on the given boundary tag.
  std::vector<int> dofs_on(BoundaryTag tag) const {
    std::vector<char> mark(n_dofs_, 0);
    for (const auto& f : mesh_->boundary) {
      if (f.tag != tag) continue;
      const auto fd = facet_dofs(f);
      for (int k = 0; k < dofs_per_facet(); ++k) mark[fd[k]] = 1;
    }
    std::vector<int> out;
    for (int i = 0; i < n_dofs_; ++i)
      if (mark[i]) out.push_back(i);
    return out;
  }

 private:
  const Mesh* mesh_;
  int degree_;
  int n_dofs_ = 0;
  std::vector<std::array<int, 6>> cell_dofs_;
  std::map<std::pair<int, int>, int> edge_ids_;
};

struct FeFunction {
  const FeSpace* space;
  std::vector<Complex> coeffs;

  FeFunction(const FeSpace& s) : space(&s), coeffs(s.n_dofs(), Complex(0)) {}
  FeFunction(const FeSpace& s, std::vector<Complex> c) : space(&s), coeffs(std::move(c)) {
    if (static_cast<int>(coeffs.size()) != s.n_dofs())
      throw std::invalid_argument("FeFunction: coefficient length mismatch");
  }
};

namespace detail {
inline std::array<double, 3> barycentric(const Mesh& mesh, int t, Vec2 p) {
  const auto& tr = mesh.triangles[t];
  const Vec2 a = mesh.vertices[tr[0]], b = mesh.vertices[tr[1]], c = mesh.vertices[tr[2]];
  const double det = cross(b - a, c - a);
  const double l1 = cross(p - a, c - a) / det;
  const double l2 = cross(b - a, p - a) / det;
  return {1.0 - l1 - l2, l1, l2};
}
}  // namespace detail

/// Value of a finite element function at a point of the given cell.
inline Complex evaluate(const FeFunction& f, Vec2 p, int cell) {
  const auto l = detail::barycentric(f.space->mesh(), cell, p);
  if (l[0] < -1e-10 || l[1] < -1e-10 || l[2] < -1e-10)
    throw std::domain_error("evaluate: point outside cell");
  double phi[6];
  f.space->cell_basis(l, phi);
  const auto& dofs = f.space->cell_dofs(cell);
  Complex v = 0;
  for (int k = 0; k < f.space->dofs_per_cell(); ++k) v += f.coeffs[dofs[k]] * phi[k];
  return v;
}

/// A^L: volume terms by a rule exact to degree 2p, Sigma boundary mass by
/// (p+1)-point facet Gauss.  The matrix is symmetric (not Hermitian).
inline ComplexCsrMatrix assemble_local(const FeSpace& space, double kappa) {
  const Mesh& mesh = space.mesh();
  const int n = space.n_dofs();
  const int dpc = space.dofs_per_cell();

  // sparsity pattern
  std::vector<std::vector<int>> adj(n);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& dofs = space.cell_dofs(static_cast<int>(t));
    for (int a = 0; a < dpc; ++a)
      for (int b = 0; b < dpc; ++b) adj[dofs[a]].push_back(dofs[b]);
  }
  ComplexCsrMatrix A;
  A.n = n;
  A.row_offsets.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    auto& row = adj[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    A.row_offsets[i + 1] = A.row_offsets[i] + static_cast<int>(row.size());
  }
  A.cols.reserve(A.row_offsets[n]);
  for (int i = 0; i < n; ++i) A.cols.insert(A.cols.end(), adj[i].begin(), adj[i].end());
  A.vals.assign(A.cols.size(), Complex(0));

  const TriangleRule rule = triangle_rule(2 * space.degree());
  double phi[6];
  Vec2 grad[6];
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& dofs = space.cell_dofs(static_cast<int>(t));
    const double detJ = 2.0 * mesh.signed_area(static_cast<int>(t));
    for (std::size_t qp = 0; qp < rule.bary.size(); ++qp) {
      space.cell_basis(rule.bary[qp], phi);
      space.cell_basis_grad(static_cast<int>(t), rule.bary[qp], grad);
      const double w = rule.weights[qp] * detJ;
      for (int a = 0; a < dpc; ++a)
        for (int b = 0; b < dpc; ++b) {
          const double v = w * (dot(grad[a], grad[b]) - kappa * kappa * phi[a] * phi[b]);
          A.at(dofs[a], dofs[b]) += v;
        }
    }
  }

  const Rule1d frule = gauss_legendre(space.degree() + 1);
  const int dpf = space.dofs_per_facet();
  double fphi[3];
  for (const auto& f : mesh.boundary) {
    if (f.tag != BoundaryTag::sigma) continue;
    const auto fd = space.facet_dofs(f);
    const double len = dist(mesh.vertices[f.v[0]], mesh.vertices[f.v[1]]);
    for (std::size_t k = 0; k < frule.points.size(); ++k) {
      const double s = 0.5 * (1.0 + frule.points[k]);
      const double w = 0.5 * len * frule.weights[k];
      space.facet_basis(s, fphi);
      for (int a = 0; a < dpf; ++a)
        for (int b = 0; b < dpf; ++b)
          A.at(fd[a], fd[b]) += Complex(0, -kappa) * (w * fphi[a] * fphi[b]);
    }
  }
  return A;
}

/// <f, v>_Gamma with f sampled at facet quadrature points together with
/// the facet normal (out of the domain).
inline std::vector<Complex> assemble_neumann_rhs(
    const FeSpace& space, const std::function<Complex(Vec2, Vec2)>& f) {
  const Mesh& mesh = space.mesh();
  std::vector<Complex> b(space.n_dofs(), Complex(0));
  const Rule1d rule = gauss_legendre(6);
  const int dpf = space.dofs_per_facet();
  double phi[3];
  for (const auto& facet : mesh.boundary) {
    if (facet.tag != BoundaryTag::gamma) continue;
    const auto fd = space.facet_dofs(facet);
    const FacetGeometry geo = mesh.facet_geometry(facet);
    const Vec2 a = mesh.vertices[facet.v[0]], bb = mesh.vertices[facet.v[1]];
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      const double s = 0.5 * (1.0 + rule.points[k]);
      const double w = 0.5 * geo.length * rule.weights[k];
      const Complex fv = f(a + s * (bb - a), geo.unit_normal);
      space.facet_basis(s, phi);
      for (int d = 0; d < dpf; ++d) b[fd[d]] += w * fv * phi[d];
    }
  }
  return b;
}

namespace detail {
struct ErrorAccum {
  double num = 0, den = 0;
};

template <class F>
inline ErrorAccum integrate_error(const FeFunction& u, F&& contrib) {
  const FeSpace& space = *u.space;
  const Mesh& mesh = space.mesh();
  const TriangleRule rule = triangle_rule(2 * space.degree() + 2);
  ErrorAccum acc;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const double detJ = 2.0 * mesh.signed_area(static_cast<int>(t));
    for (std::size_t qp = 0; qp < rule.bary.size(); ++qp)
      contrib(static_cast<int>(t), rule.bary[qp], rule.weights[qp] * detJ, acc);
  }
  return acc;
}
}  // namespace detail

inline double l2_error(const FeFunction& u, const std::function<Complex(Vec2)>& exact,
                       double* exact_norm = nullptr) {
  const FeSpace& space = *u.space;
  const Mesh& mesh = space.mesh();
  double phi[6];
  auto acc = detail::integrate_error(
      u, [&](int t, const std::array<double, 3>& l, double w, detail::ErrorAccum& a) {
        const auto& tr = mesh.triangles[t];
        const Vec2 p = l[0] * mesh.vertices[tr[0]] + l[1] * mesh.vertices[tr[1]] +
                       l[2] * mesh.vertices[tr[2]];
        space.cell_basis(l, phi);
        const auto& dofs = space.cell_dofs(t);
        Complex uh = 0;
        for (int k = 0; k < space.dofs_per_cell(); ++k) uh += u.coeffs[dofs[k]] * phi[k];
        const Complex ue = exact(p);
        a.num += w * std::norm(uh - ue);
        a.den += w * std::norm(ue);
      });
  if (exact_norm) *exact_norm = std::sqrt(acc.den);
  return std::sqrt(acc.num);
}

inline double relative_l2_error(const FeFunction& u, const std::function<Complex(Vec2)>& exact) {
  double nrm = 0;
  const double err = l2_error(u, exact, &nrm);
  return err / nrm;
}

/// Full H1 norm error: sqrt(L2^2 + |grad .|_{L2}^2).
inline double h1_error(const FeFunction& u, const std::function<Complex(Vec2)>& exact,
                       const std::function<std::array<Complex, 2>(Vec2)>& exact_grad,
                       double* exact_norm = nullptr) {
  const FeSpace& space = *u.space;
  const Mesh& mesh = space.mesh();
  double phi[6];
  Vec2 grad[6];
  auto acc = detail::integrate_error(
      u, [&](int t, const std::array<double, 3>& l, double w, detail::ErrorAccum& a) {
        const auto& tr = mesh.triangles[t];
        const Vec2 p = l[0] * mesh.vertices[tr[0]] + l[1] * mesh.vertices[tr[1]] +
                       l[2] * mesh.vertices[tr[2]];
        space.cell_basis(l, phi);
        space.cell_basis_grad(t, l, grad);
        const auto& dofs = space.cell_dofs(t);
        Complex uh = 0, gx = 0, gy = 0;
        for (int k = 0; k < space.dofs_per_cell(); ++k) {
          uh += u.coeffs[dofs[k]] * phi[k];
          gx += u.coeffs[dofs[k]] * grad[k].x;
          gy += u.coeffs[dofs[k]] * grad[k].y;
        }
        const Complex ue = exact(p);
        const auto ge = exact_grad(p);
        a.num += w * (std::norm(uh - ue) + std::norm(gx - ge[0]) + std::norm(gy - ge[1]));
        a.den += w * (std::norm(ue) + std::norm(ge[0]) + std::norm(ge[1]));
      });
  if (exact_norm) *exact_norm = std::sqrt(acc.den);
  return std::sqrt(acc.num);
}

inline double relative_h1_error(const FeFunction& u, const std::function<Complex(Vec2)>& exact,
                                const std::function<std::array<Complex, 2>(Vec2)>& exact_grad) {
  double nrm = 0;
  const double err = h1_error(u, exact, exact_grad, &nrm);
  return err / nrm;
}

}  // namespace exhelm
