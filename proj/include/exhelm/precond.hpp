#pragma once

// Left preconditioners over the local operator A^L: identity, ILU(0) on
// the A^L pattern, and a direct solver (reverse Cuthill-McKee ordering
// plus pivot-free symmetric profile elimination).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "exhelm/fem.hpp"

namespace exhelm {

enum class PcKind { identity, ilu0, direct };

namespace detail {

struct Ilu0Data {
  // factors stored on the A pattern; unit lower, upper includes diagonal
  std::vector<int> row_offsets, cols, diag_pos;
  std::vector<Complex> vals;
};

struct SkylineData {
  std::vector<int> perm;     // new -> old
  std::vector<int> iperm;    // old -> new
  std::vector<int> start;    // envelope row offsets (strictly lower part)
  std::vector<int> first;    // first column of each envelope row
  std::vector<Complex> env;  // L entries, unit diagonal implied
  std::vector<Complex> diag; // D
};

inline std::vector<int> reverse_cuthill_mckee(const ComplexCsrMatrix& A) {
  const int n = A.n;
  std::vector<int> degree(n);
  for (int i = 0; i < n; ++i) degree[i] = A.row_offsets[i + 1] - A.row_offsets[i];
  std::vector<int> order;
  order.reserve(n);
  std::vector<char> visited(n, 0);
  std::vector<int> nbrs;
  for (;;) {
    int seed = -1;
    for (int i = 0; i < n; ++i)
      if (!visited[i] && (seed < 0 || degree[i] < degree[seed])) seed = i;
    if (seed < 0) break;
    std::queue<int> bfs;
    bfs.push(seed);
    visited[seed] = 1;
    while (!bfs.empty()) {
      const int v = bfs.front();
      bfs.pop();
      order.push_back(v);
      nbrs.clear();
      for (int k = A.row_offsets[v]; k < A.row_offsets[v + 1]; ++k) {
        const int u = A.cols[k];
        if (u != v && !visited[u]) {
          visited[u] = 1;
          nbrs.push_back(u);
        }
      }
      std::sort(nbrs.begin(), nbrs.end(),
                [&](int a, int b) { return degree[a] != degree[b] ? degree[a] < degree[b] : a < b; });
      for (int u : nbrs) bfs.push(u);
    }
  }
  std::reverse(order.begin(), order.end());
  return order;  // new index -> old index
}

}  // namespace detail

class Preconditioner {
 public:
  static Preconditioner identity(int n) {
    Preconditioner p;
    p.kind_ = PcKind::identity;
    p.n_ = n;
    return p;
  }

  PcKind kind() const { return kind_; }
  int n() const { return n_; }

  void apply(const Complex* r, Complex* z) const {
    switch (kind_) {
      case PcKind::identity:
        std::copy(r, r + n_, z);
        return;
      case PcKind::ilu0: {
        const auto& f = ilu_;
        for (int i = 0; i < n_; ++i) {
          Complex acc = r[i];
          for (int k = f.row_offsets[i]; k < f.diag_pos[i]; ++k) acc -= f.vals[k] * z[f.cols[k]];
          z[i] = acc;
        }
        for (int i = n_ - 1; i >= 0; --i) {
          Complex acc = z[i];
          for (int k = f.diag_pos[i] + 1; k < f.row_offsets[i + 1]; ++k)
            acc -= f.vals[k] * z[f.cols[k]];
          z[i] = acc / f.vals[f.diag_pos[i]];
        }
        return;
      }
      case PcKind::direct: {
        const auto& s = sky_;
        std::vector<Complex>& w = scratch_;
        w.resize(n_);
        for (int i = 0; i < n_; ++i) w[i] = r[s.perm[i]];
        for (int i = 0; i < n_; ++i) {  // L w = w
          Complex acc = w[i];
          const int f0 = s.first[i];
          const Complex* L = s.env.data() + s.start[i];
          for (int j = f0; j < i; ++j) acc -= L[j - f0] * w[j];
          w[i] = acc;
        }
        for (int i = 0; i < n_; ++i) w[i] /= s.diag[i];
        for (int i = n_ - 1; i >= 0; --i) {  // L^T w = w
          const int f0 = s.first[i];
          const Complex* L = s.env.data() + s.start[i];
          const Complex wi = w[i];
          for (int j = f0; j < i; ++j) w[j] -= L[j - f0] * wi;
        }
        for (int i = 0; i < n_; ++i) z[s.perm[i]] = w[i];
        return;
      }
    }
  }

  std::vector<Complex> apply(const std::vector<Complex>& r) const {
    std::vector<Complex> z(n_);
    apply(r.data(), z.data());
    return z;
  }

  /// Envelope fill of the direct factorization (diagnostics).
  std::size_t profile_size() const { return sky_.env.size(); }

  friend Preconditioner build_ilu0(const ComplexCsrMatrix& A);
  friend Preconditioner build_direct(const ComplexCsrMatrix& A);

 private:
  PcKind kind_ = PcKind::identity;
  int n_ = 0;
  detail::Ilu0Data ilu_;
  detail::SkylineData sky_;
  mutable std::vector<Complex> scratch_;
};

/// Incomplete LU with zero fill-in on the pattern of A.
inline Preconditioner build_ilu0(const ComplexCsrMatrix& A) {
  Preconditioner p;
  p.kind_ = PcKind::ilu0;
  p.n_ = A.n;
  auto& f = p.ilu_;
  f.row_offsets = A.row_offsets;
  f.cols = A.cols;
  f.vals = A.vals;
  f.diag_pos.assign(A.n, -1);
  for (int i = 0; i < A.n; ++i)
    for (int k = f.row_offsets[i]; k < f.row_offsets[i + 1]; ++k)
      if (f.cols[k] == i) f.diag_pos[i] = k;
  for (int i = 0; i < A.n; ++i)
    if (f.diag_pos[i] < 0)
      throw std::invalid_argument("build_ilu0: missing diagonal in row " + std::to_string(i));

  for (int i = 0; i < A.n; ++i) {
    for (int kp = f.row_offsets[i]; kp < f.row_offsets[i + 1] && f.cols[kp] < i; ++kp) {
      const int k = f.cols[kp];
      const Complex piv = f.vals[f.diag_pos[k]];
      if (std::abs(piv) == 0.0)
        throw std::runtime_error("build_ilu0: zero pivot in row " + std::to_string(k));
      const Complex lik = f.vals[kp] / piv;
      f.vals[kp] = lik;
      // merge row i (cols > k) against row k (cols > k)
      int a = kp + 1;
      int b = f.diag_pos[k] + 1;
      while (a < f.row_offsets[i + 1] && b < f.row_offsets[k + 1]) {
        if (f.cols[a] == f.cols[b]) {
          f.vals[a] -= lik * f.vals[b];
          ++a;
          ++b;
        } else if (f.cols[a] < f.cols[b]) {
          ++a;
        } else {
          ++b;
        }
      }
    }
    if (std::abs(f.vals[f.diag_pos[i]]) == 0.0)
      throw std::runtime_error("build_ilu0: zero pivot in row " + std::to_string(i));
  }
  return p;
}

/// Direct solver on A^L: RCM ordering, then pivot-free symmetric profile
/// (skyline) elimination A = L D L^T with unit L.
inline Preconditioner build_direct(const ComplexCsrMatrix& A) {
  if (A.n > 30000) throw std::invalid_argument("build_direct: dof count exceeds 3e4 storage guard");
  // the elimination relies on symmetry of A^L
  {
    ComplexCsrMatrix At;  // transpose walk via (col,row) pairs
    double scale = 0;
    for (const Complex& v : A.vals) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < A.n; ++i)
      for (int k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k) {
        const int j = A.cols[k];
        if (j < i) continue;
        // locate (j,i)
        bool found = false;
        for (int k2 = A.row_offsets[j]; k2 < A.row_offsets[j + 1]; ++k2)
          if (A.cols[k2] == i) {
            if (std::abs(A.vals[k2] - A.vals[k]) > 1e-10 * scale)
              throw std::invalid_argument("build_direct: matrix is not symmetric");
            found = true;
            break;
          }
        if (!found) throw std::invalid_argument("build_direct: pattern is not symmetric");
      }
  }

  Preconditioner p;
  p.kind_ = PcKind::direct;
  p.n_ = A.n;
  auto& s = p.sky_;
  s.perm = detail::reverse_cuthill_mckee(A);
  s.iperm.assign(A.n, 0);
  for (int i = 0; i < A.n; ++i) s.iperm[s.perm[i]] = i;

  s.first.assign(A.n, 0);
  for (int i = 0; i < A.n; ++i) {
    const int oi = s.perm[i];
    int fmin = i;
    for (int k = A.row_offsets[oi]; k < A.row_offsets[oi + 1]; ++k)
      fmin = std::min(fmin, s.iperm[A.cols[k]]);
    s.first[i] = fmin;
  }
  // profile must be monotone for the elimination loops: widen rows so the
  // envelope contains all fill
  s.start.assign(A.n + 1, 0);
  for (int i = 0; i < A.n; ++i) s.start[i + 1] = s.start[i] + (i - s.first[i]);
  if (static_cast<double>(s.start[A.n]) * sizeof(Complex) > 2.0e8)
    throw std::invalid_argument("build_direct: profile storage guard exceeded");
  s.env.assign(s.start[A.n], Complex(0));
  s.diag.assign(A.n, Complex(0));

  // scatter permuted A into the envelope (lower triangle + diagonal)
  for (int i = 0; i < A.n; ++i) {
    const int oi = s.perm[i];
    for (int k = A.row_offsets[oi]; k < A.row_offsets[oi + 1]; ++k) {
      const int j = s.iperm[A.cols[k]];
      if (j < i)
        s.env[s.start[i] + (j - s.first[i])] += A.vals[k];
      else if (j == i)
        s.diag[i] += A.vals[k];
    }
  }

  double dscale = 0;
  for (int i = 0; i < A.n; ++i) dscale = std::max(dscale, std::abs(s.diag[i]));
  for (int i = 0; i < A.n; ++i) {
    Complex* Li = s.env.data() + s.start[i];
    const int fi = s.first[i];
    for (int j = fi; j < i; ++j) {
      const int fj = s.first[j];
      const Complex* Lj = s.env.data() + s.start[j];
      Complex acc = Li[j - fi];
      const int k0 = std::max(fi, fj);
      for (int k = k0; k < j; ++k) acc -= Li[k - fi] * s.diag[k] * Lj[k - fj];
      Li[j - fi] = acc / s.diag[j];
    }
    Complex d = s.diag[i];
    for (int k = fi; k < i; ++k) d -= Li[k - fi] * Li[k - fi] * s.diag[k];
    if (std::abs(d) < 1e-14 * dscale)
      throw std::runtime_error("build_direct: negligible pivot at permuted row " +
                               std::to_string(i) + " (matrix numerically singular)");
    s.diag[i] = d;
  }
  return p;
}

/// Max |i - j| over nonzeros under an ordering (new -> old); identity
/// permutation measures the natural bandwidth.
inline int bandwidth(const ComplexCsrMatrix& A, const std::vector<int>& perm) {
  std::vector<int> iperm(A.n);
  for (int i = 0; i < A.n; ++i) iperm[perm[i]] = i;
  int bw = 0;
  for (int i = 0; i < A.n; ++i)
    for (int k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k)
      bw = std::max(bw, std::abs(iperm[i] - iperm[A.cols[k]]));
  return bw;
}

inline std::vector<int> natural_order(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

inline std::vector<int> rcm_order(const ComplexCsrMatrix& A) {
  return detail::reverse_cuthill_mckee(A);
}

}  // namespace exhelm
