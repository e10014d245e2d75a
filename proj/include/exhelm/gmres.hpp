#pragma once

// Restarted GMRES over complex vectors with a pluggable left
// preconditioner.  Arnoldi uses modified Gram-Schmidt with one
// reorthogonalization pass; the least-squares problem is carried by Givens
// rotations, so the preconditioned relative residual is available at every
// step.  Convergence is tested on ||P^-1 (b - A x)|| / ||P^-1 b||.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "exhelm/fem.hpp"
#include "exhelm/precond.hpp"

namespace exhelm {

struct LinearOperator {
  int n = 0;
  std::function<void(const std::vector<Complex>&, std::vector<Complex>&)> apply;

  static LinearOperator from_csr(const ComplexCsrMatrix& A) {
    return {A.n, [&A](const std::vector<Complex>& x, std::vector<Complex>& y) {
              y.resize(A.n);
              A.matvec(x.data(), y.data());
            }};
  }
};

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  bool breakdown = false;
  std::vector<double> residual_history;  // preconditioned relative residuals
  int restart = 0;
  double rtol = 0;
};

namespace detail {
inline double nrm2(const std::vector<Complex>& v) {
  double s = 0;
  for (const Complex& c : v) s += std::norm(c);
  return std::sqrt(s);
}

inline Complex cdot(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  Complex s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}
}  // namespace detail

inline std::pair<std::vector<Complex>, SolveReport> gmres(const LinearOperator& op,
                                                          const std::vector<Complex>& b,
                                                          const Preconditioner& pc, double rtol,
                                                          int restart, int maxit) {
  const int n = op.n;
  if (static_cast<int>(b.size()) != n || pc.n() != n)
    throw std::invalid_argument("gmres: dimension mismatch");
  if (!(rtol > 0 && rtol < 1) || restart < 1 || maxit < 1)
    throw std::invalid_argument("gmres: invalid rtol/restart/maxit");

  SolveReport rep;
  rep.restart = restart;
  rep.rtol = rtol;

  std::vector<Complex> x(n, Complex(0));
  std::vector<Complex> pb = pc.apply(b);
  const double bnorm = detail::nrm2(pb);
  if (bnorm == 0.0) {
    rep.converged = true;
    rep.residual_history.push_back(0.0);
    return {x, rep};
  }

  std::vector<std::vector<Complex>> V;
  std::vector<std::vector<Complex>> H;  // H[j] holds column j (j+2 entries)
  std::vector<Complex> cs(restart), sn(restart), g(restart + 1);
  std::vector<Complex> w(n), t(n);

  auto form_update = [&]() {
    // back substitution on the triangular system built so far, x += V y
    const int k = static_cast<int>(H.size());
    std::vector<Complex> y(k);
    for (int i = k - 1; i >= 0; --i) {
      Complex acc = g[i];
      for (int j = i + 1; j < k; ++j) acc -= H[j][i] * y[j];
      y[i] = acc / H[i][i];
    }
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < n; ++i) x[i] += y[j] * V[j][i];
  };

  bool first_entry = true;
  while (rep.iterations < maxit) {
    // (re)start from the true preconditioned residual
    op.apply(x, t);
    for (int i = 0; i < n; ++i) t[i] = b[i] - t[i];
    std::vector<Complex> r = pc.apply(t);
    const double beta = detail::nrm2(r);
    if (first_entry) {
      rep.residual_history.push_back(beta / bnorm);
      first_entry = false;
    }
    if (beta / bnorm <= rtol) {
      rep.converged = true;
      return {x, rep};
    }

    V.assign(1, r);
    for (Complex& c : V[0]) c /= beta;
    H.clear();
    std::fill(g.begin(), g.end(), Complex(0));
    g[0] = beta;

    for (int j = 0; j < restart && rep.iterations < maxit; ++j) {
      op.apply(V[j], t);
      pc.apply(t.data(), w.data());
      const double pre_norm = detail::nrm2(w);

      std::vector<Complex> h(j + 2, Complex(0));
      for (int i = 0; i <= j; ++i) {
        const Complex c = detail::cdot(V[i], w);
        h[i] = c;
        for (int l = 0; l < n; ++l) w[l] -= c * V[i][l];
      }
      for (int i = 0; i <= j; ++i) {  // one reorthogonalization pass
        const Complex c = detail::cdot(V[i], w);
        h[i] += c;
        for (int l = 0; l < n; ++l) w[l] -= c * V[i][l];
      }
      const double hlast = detail::nrm2(w);
      h[j + 1] = hlast;
      ++rep.iterations;

      const bool broke = hlast <= 1e-14 * (pre_norm > 0 ? pre_norm : 1.0);
      if (!broke) {
        std::vector<Complex> v = w;
        for (Complex& c : v) c /= hlast;
        V.push_back(std::move(v));
      }

      // apply accumulated Givens rotations to the new column
      for (int i = 0; i < j; ++i) {
        const Complex tmp = std::conj(cs[i]) * h[i] + std::conj(sn[i]) * h[i + 1];
        h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
        h[i] = tmp;
      }
      const double denom = std::sqrt(std::norm(h[j]) + std::norm(h[j + 1]));
      if (denom <= 1e-300) {
        // A v_j brought no new information at all: the least-squares
        // residual cannot decrease any further in this basis
        rep.residual_history.push_back(rep.residual_history.back());
        form_update();
        rep.breakdown = true;
        return {x, rep};
      }
      cs[j] = h[j] / denom;
      sn[j] = h[j + 1] / denom;
      const Complex tmp = std::conj(cs[j]) * h[j] + std::conj(sn[j]) * h[j + 1];
      h[j] = tmp;
      h[j + 1] = 0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = std::conj(cs[j]) * g[j];
      H.push_back(std::move(h));

      const double res = std::abs(g[j + 1]) / bnorm;
      rep.residual_history.push_back(res);

      if (res <= rtol) {
        form_update();
        rep.converged = true;
        return {x, rep};
      }
      if (broke) {  // stagnated basis without convergence
        form_update();
        rep.breakdown = true;
        return {x, rep};
      }
    }
    form_update();
  }
  return {x, rep};
}

}  // namespace exhelm
