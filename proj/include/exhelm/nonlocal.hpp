#pragma once

// The nonlocal coupling: boundary quadrature on Gamma (sources) and Sigma
// (targets) plus the kernels give the action of A^NL and the nonlocal
// right-hand-side term without ever storing the dof-level block unless
// asked to.
//
// Orientation: mesh facet normals point out of the computational domain;
// on Gamma that is into the scatterer.  The exterior Green's representation
// wants the scatterer-outward normal, so source normals enter the kernels
// as -n_gamma.  Neumann traces are always taken with respect to the mesh
// normal n_gamma.  This sign composition is certified by the Green's
// identity oracle; see evaluate_representation.
//
// Accumulation orders are fixed (sources in quadrature order per target,
// targets in order per dof), so results are bitwise reproducible.

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "exhelm/fem.hpp"
#include "exhelm/kernels.hpp"
#include "exhelm/quadrature.hpp"

namespace exhelm {

enum class NonlocalMode { matrix_free, explicit_dense };

struct DenseMatrix {
  int rows = 0, cols = 0;
  std::vector<Complex> a;  // row-major

  Complex& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  Complex operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

class NonlocalOperator {
 public:
  NonlocalOperator(const Mesh& mesh, KernelParams params, int q,
                   NonlocalMode mode = NonlocalMode::matrix_free)
      : mesh_(&mesh),
        params_(params),
        mode_(mode),
        sources_(build_quadrature(mesh, BoundaryTag::gamma, q)),
        targets_(build_quadrature(mesh, BoundaryTag::sigma, q)) {
    if (mode_ == NonlocalMode::explicit_dense) {
      const std::size_t nt = targets_.size(), ns = sources_.size();
      if (nt * ns > std::size_t(1e8))
        throw std::invalid_argument("NonlocalOperator: dense kernel cache would exceed guard");
      kernel_cache_.emplace();
      kernel_cache_->rows = static_cast<int>(nt);
      kernel_cache_->cols = static_cast<int>(ns);
      kernel_cache_->a.resize(nt * ns);
      for (std::size_t t = 0; t < nt; ++t)
        for (std::size_t s = 0; s < ns; ++s)
          (*kernel_cache_)(static_cast<int>(t), static_cast<int>(s)) =
              sources_.weights[s] * kernel_Ktilde(targets_.points[t], sources_.points[s],
                                                  targets_.normals[t], -sources_.normals[s],
                                                  params_);
    }
  }

  const Mesh& mesh() const { return *mesh_; }
  const KernelParams& params() const { return params_; }
  NonlocalMode mode() const { return mode_; }
  const BoundaryQuadrature& sources() const { return sources_; }
  const BoundaryQuadrature& targets() const { return targets_; }

  /// Weighted kernel row entry: w_s * Ktilde(x_t, y_s, n_t, -n_s).
  Complex weighted_kernel(std::size_t t, std::size_t s) const {
    if (kernel_cache_) return (*kernel_cache_)(static_cast<int>(t), static_cast<int>(s));
    return sources_.weights[s] * kernel_Ktilde(targets_.points[t], sources_.points[s],
                                               targets_.normals[t], -sources_.normals[s], params_);
  }

 private:
  const Mesh* mesh_;
  KernelParams params_;
  NonlocalMode mode_;
  BoundaryQuadrature sources_;
  BoundaryQuadrature targets_;
  std::optional<DenseMatrix> kernel_cache_;
};

namespace detail {
/// Evaluate a coefficient vector at every source quadrature point.
inline std::vector<Complex> trace_at_sources(const NonlocalOperator& op, const FeSpace& space,
                                             const std::vector<Complex>& coeffs) {
  const auto& src = op.sources();
  std::vector<Complex> v(src.size());
  const int dpf = space.dofs_per_facet();
  double phi[3];
  for (std::size_t p = 0; p < src.size(); ++p) {
    const auto& facet = space.mesh().boundary[src.facets[src.facet_of[p]].mesh_facet];
    const auto fd = space.facet_dofs(facet);
    space.facet_basis(src.ref[p], phi);
    Complex acc = 0;
    for (int k = 0; k < dpf; ++k) acc += coeffs[fd[k]] * phi[k];
    v[p] = acc;
  }
  return v;
}

/// Integrate values given at target quadrature points against the test
/// basis on Sigma; contributions land only on Sigma-supported dofs.
inline std::vector<Complex> scatter_to_dofs(const NonlocalOperator& op, const FeSpace& space,
                                            const std::vector<Complex>& pot) {
  const auto& tgt = op.targets();
  std::vector<Complex> out(space.n_dofs(), Complex(0));
  const int dpf = space.dofs_per_facet();
  double phi[3];
  for (std::size_t p = 0; p < tgt.size(); ++p) {
    const auto& facet = space.mesh().boundary[tgt.facets[tgt.facet_of[p]].mesh_facet];
    const auto fd = space.facet_dofs(facet);
    space.facet_basis(tgt.ref[p], phi);
    const Complex wv = tgt.weights[p] * pot[p];
    for (int k = 0; k < dpf; ++k) out[fd[k]] += wv * phi[k];
  }
  return out;
}
}  // namespace detail

/// Action of A^NL on a coefficient vector:  evaluate on Gamma, apply the
/// two-boundary kernel to Sigma quadrature points, integrate against the
/// test functions facet by facet.
inline std::vector<Complex> apply_nonlocal(const NonlocalOperator& op, const FeSpace& space,
                                           const std::vector<Complex>& coeffs) {
  if (static_cast<int>(coeffs.size()) != space.n_dofs())
    throw std::invalid_argument("apply_nonlocal: coefficient length mismatch");
  if (&space.mesh() != &op.mesh())
    throw std::invalid_argument("apply_nonlocal: space and operator use different meshes");
  const std::vector<Complex> v = detail::trace_at_sources(op, space, coeffs);
  const auto& tgt = op.targets();
  std::vector<Complex> pot(tgt.size());
  for (std::size_t t = 0; t < tgt.size(); ++t) {
    Complex acc = 0;
    for (std::size_t s = 0; s < v.size(); ++s) acc += op.weighted_kernel(t, s) * v[s];
    pot[t] = acc;
  }
  return detail::scatter_to_dofs(op, space, pot);
}

/// Explicit dense A^NL restricted to (Sigma-supported rows) x
/// (Gamma-supported columns), plus the dof index maps.
struct NonlocalDenseBlock {
  std::vector<int> row_dofs;  // Sigma-supported
  std::vector<int> col_dofs;  // Gamma-supported
  DenseMatrix m;

  /// Embed into the full dof ordering and multiply.
  std::vector<Complex> apply(int n_dofs, const std::vector<Complex>& x) const {
    std::vector<Complex> out(n_dofs, Complex(0));
    for (std::size_t i = 0; i < row_dofs.size(); ++i) {
      Complex acc = 0;
      for (std::size_t j = 0; j < col_dofs.size(); ++j)
        acc += m(static_cast<int>(i), static_cast<int>(j)) * x[col_dofs[j]];
      out[row_dofs[i]] = acc;
    }
    return out;
  }
};

inline NonlocalDenseBlock assemble_nonlocal_dense(const NonlocalOperator& op,
                                                  const FeSpace& space) {
  NonlocalDenseBlock blk;
  blk.row_dofs = space.dofs_on(BoundaryTag::sigma);
  blk.col_dofs = space.dofs_on(BoundaryTag::gamma);
  const std::size_t nr = blk.row_dofs.size(), nc = blk.col_dofs.size();
  if (nr * nc > std::size_t(1e8))
    throw std::invalid_argument("assemble_nonlocal_dense: size guard exceeded");
  std::vector<int> col_of(space.n_dofs(), -1), row_of(space.n_dofs(), -1);
  for (std::size_t j = 0; j < nc; ++j) col_of[blk.col_dofs[j]] = static_cast<int>(j);
  for (std::size_t i = 0; i < nr; ++i) row_of[blk.row_dofs[i]] = static_cast<int>(i);

  const auto& src = op.sources();
  const auto& tgt = op.targets();
  // B_src: source quad point -> basis coefficients on Gamma dofs
  const int dpf = space.dofs_per_facet();
  double phi[3];
  DenseMatrix bsrc;  // src.size() x nc
  bsrc.rows = static_cast<int>(src.size());
  bsrc.cols = static_cast<int>(nc);
  bsrc.a.assign(src.size() * nc, Complex(0));
  for (std::size_t p = 0; p < src.size(); ++p) {
    const auto& facet = space.mesh().boundary[src.facets[src.facet_of[p]].mesh_facet];
    const auto fd = space.facet_dofs(facet);
    space.facet_basis(src.ref[p], phi);
    for (int k = 0; k < dpf; ++k) bsrc(static_cast<int>(p), col_of[fd[k]]) += phi[k];
  }

  blk.m.rows = static_cast<int>(nr);
  blk.m.cols = static_cast<int>(nc);
  blk.m.a.assign(nr * nc, Complex(0));
  std::vector<Complex> krow(src.size());
  for (std::size_t t = 0; t < tgt.size(); ++t) {
    for (std::size_t s = 0; s < src.size(); ++s) krow[s] = op.weighted_kernel(t, s);
    const auto& facet = space.mesh().boundary[tgt.facets[tgt.facet_of[t]].mesh_facet];
    const auto fd = space.facet_dofs(facet);
    space.facet_basis(tgt.ref[t], phi);
    // row contribution: w_t phi_i(x_t) * sum_s krow[s] * bsrc[s][j]
    std::vector<Complex> kb(nc, Complex(0));
    for (std::size_t s = 0; s < src.size(); ++s) {
      const Complex ks = krow[s];
      for (std::size_t j = 0; j < nc; ++j) kb[j] += ks * bsrc(static_cast<int>(s), static_cast<int>(j));
    }
    for (int k = 0; k < dpf; ++k) {
      const int i = row_of[fd[k]];
      const Complex w = tgt.weights[t] * phi[k];
      for (std::size_t j = 0; j < nc; ++j) blk.m(i, static_cast<int>(j)) += w * kb[j];
    }
  }
  return blk;
}

/// <(i kappa - d/dn) S(f), phi_i>_Sigma for Neumann data f(point, normal)
/// sampled on Gamma with the mesh normal.
inline std::vector<Complex> nonlocal_rhs(const NonlocalOperator& op, const FeSpace& space,
                                         const std::function<Complex(Vec2, Vec2)>& f) {
  const auto& src = op.sources();
  const auto& tgt = op.targets();
  std::vector<Complex> fv(src.size());
  for (std::size_t s = 0; s < src.size(); ++s) fv[s] = f(src.points[s], src.normals[s]);
  std::vector<Complex> pot(tgt.size());
  for (std::size_t t = 0; t < tgt.size(); ++t) {
    Complex acc = 0;
    for (std::size_t s = 0; s < src.size(); ++s)
      acc += src.weights[s] *
             kernel_rhs(tgt.points[t], src.points[s], tgt.normals[t], op.params()) * fv[s];
    pot[t] = acc;
  }
  return detail::scatter_to_dofs(op, space, pot);
}

/// Field reconstruction from Cauchy data on Gamma:
///   u(x) = D(u)(x) - S(du/dnu)(x)
/// with the scatterer-outward normal nu = -n_gamma.  The trace arrays are
/// sampled at the source quadrature points; dudn_trace is taken with
/// respect to the mesh normal n_gamma, so S enters with a plus sign.
inline std::vector<Complex> evaluate_representation(const BoundaryQuadrature& gamma_quad,
                                                    const KernelParams& params,
                                                    const std::vector<Complex>& u_trace,
                                                    const std::vector<Complex>& dudn_trace,
                                                    const std::vector<Vec2>& targets) {
  if (u_trace.size() != gamma_quad.size() || dudn_trace.size() != gamma_quad.size())
    throw std::invalid_argument("evaluate_representation: trace length mismatch");
  // quadrature accuracy guard: targets must stay away from the boundary
  const int q = gamma_quad.points_per_facet;
  for (const Vec2& x : targets)
    for (std::size_t k = 0; k < gamma_quad.facets.size(); ++k) {
      double dmin = std::numeric_limits<double>::infinity();
      for (int j = 0; j < q; ++j)
        dmin = std::min(dmin, dist(x, gamma_quad.points[k * q + j]));
      if (dmin < gamma_quad.facets[k].length)
        throw std::domain_error(
            "evaluate_representation: target closer to Gamma than one facet length");
    }
  std::vector<Complex> out(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    Complex acc = 0;
    for (std::size_t s = 0; s < gamma_quad.size(); ++s) {
      const double w = gamma_quad.weights[s];
      acc += w * (kernel_dK_dny(targets[i], gamma_quad.points[s], -gamma_quad.normals[s], params) *
                      u_trace[s] +
                  kernel_K(targets[i], gamma_quad.points[s], params) * dudn_trace[s]);
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace exhelm
