#pragma once

// Pointwise Helmholtz kernels for the two-boundary coupling.  With
// g(r) = (i/4) H0(kappa r) the outgoing free-space kernel,
//   g'(r)  = -(i kappa/4)   H1(kappa r)
//   g''(r) = -(i kappa^2/4) (H0(kappa r) - H1(kappa r)/(kappa r))
// and the directional derivatives follow by the chain rule.  Every
// derived formula here is pinned against central finite differences in
// the test suite before anything downstream may use it.
//
// Source and target points are always on separated boundaries, so r > 0;
// coincident points are a hard error, never a regularized value.

#include <cmath>
#include <stdexcept>

#include "exhelm/geometry.hpp"
#include "exhelm/specfun.hpp"

namespace exhelm {

struct KernelParams {
  double kappa;  // wave number, > 0

  explicit KernelParams(double k) : kappa(k) {
    if (!(k > 0) || !std::isfinite(k))
      throw std::domain_error("KernelParams: kappa must be finite and positive");
  }
};

namespace detail {
inline double separation(Vec2 x, Vec2 y) {
  const double r = dist(x, y);
  if (!(r > 0)) throw std::domain_error("kernel evaluation at coincident points");
  return r;
}

inline Complex g1(double r, double kappa) {  // g'(r)
  return Complex(0, -0.25 * kappa) * specfun::hankel1(1, kappa * r);
}

inline Complex g2(double r, double kappa) {  // g''(r)
  const Complex h0 = specfun::hankel1(0, kappa * r);
  const Complex h1 = specfun::hankel1(1, kappa * r);
  return Complex(0, -0.25 * kappa * kappa) * (h0 - h1 / (kappa * r));
}
}  // namespace detail

/// (i/4) H0(kappa |x-y|)
inline Complex kernel_K(Vec2 x, Vec2 y, const KernelParams& p) {
  const double r = detail::separation(x, y);
  return Complex(0, 0.25) * specfun::hankel1(0, p.kappa * r);
}

/// Derivative of kernel_K in direction n_y at the source point.
inline Complex kernel_dK_dny(Vec2 x, Vec2 y, Vec2 n_y, const KernelParams& p) {
  const double r = detail::separation(x, y);
  return detail::g1(r, p.kappa) * (dot(n_y, y - x) / r);
}

/// (i kappa - d/dn_x) applied to kernel_dK_dny; the two-boundary coupling
/// kernel of the nonlocal bilinear form.
inline Complex kernel_Ktilde(Vec2 x, Vec2 y, Vec2 n_x, Vec2 n_y, const KernelParams& p) {
  const double r = detail::separation(x, y);
  const Vec2 u = y - x;
  const double uny = dot(u, n_y);
  const double unx = dot(-u, n_x);  // (x - y) . n_x
  const Complex gp = detail::g1(r, p.kappa);
  const Complex dK_dny = gp * (uny / r);
  const Complex ddnx = detail::g2(r, p.kappa) * (unx / r) * (uny / r) +
                       gp * (-dot(n_x, n_y) / r - uny * unx / (r * r * r));
  return Complex(0, p.kappa) * dK_dny - ddnx;
}

/// (i kappa - d/dn_x) applied to kernel_K; the single-layer kernel of the
/// nonlocal right-hand-side term.
inline Complex kernel_rhs(Vec2 x, Vec2 y, Vec2 n_x, const KernelParams& p) {
  const double r = detail::separation(x, y);
  const Complex K = Complex(0, 0.25) * specfun::hankel1(0, p.kappa * r);
  return Complex(0, p.kappa) * K - detail::g1(r, p.kappa) * (dot(x - y, n_x) / r);
}

}  // namespace exhelm
