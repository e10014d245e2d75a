#pragma once

// Independent slow Bessel oracle for the test suite: direct power series
// for J_n, series-with-log for Y_n, evaluated in MPFR arbitrary precision.
// The alternating series cancels like e^x, so the working precision is
// scaled with the argument; the result is then correctly rounded to
// double.  Deliberately shares no code with the library implementation.

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

namespace detail {

inline mpfr_prec_t prec_for(double x) {
  return static_cast<mpfr_prec_t>(160 + 1.5 * x);
}

// sum_{k>=0} (-1)^k (x/2)^(n+2k) / (k! (n+k)!)
inline void j_series(mpfr_t out, int n, double x, mpfr_prec_t prec) {
  mpfr_t q, term, sum, maxt, tol;
  mpfr_inits2(prec, q, term, sum, maxt, tol, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_d(q, x, MPFR_RNDN);
  mpfr_div_ui(q, q, 2, MPFR_RNDN);
  mpfr_sqr(q, q, MPFR_RNDN);  // q = x^2/4

  mpfr_set_d(term, x, MPFR_RNDN);  // term = (x/2)^n / n!
  mpfr_div_ui(term, term, 2, MPFR_RNDN);
  if (n == 0) mpfr_set_ui(term, 1, MPFR_RNDN);
  if (n == 2) {
    mpfr_sqr(term, term, MPFR_RNDN);
    mpfr_div_ui(term, term, 2, MPFR_RNDN);
  }
  mpfr_set(sum, term, MPFR_RNDN);
  mpfr_abs(maxt, term, MPFR_RNDN);

  for (unsigned long k = 1; k < 200000; ++k) {
    mpfr_mul(term, term, q, MPFR_RNDN);
    mpfr_div_ui(term, term, k, MPFR_RNDN);
    mpfr_div_ui(term, term, k + static_cast<unsigned long>(n), MPFR_RNDN);
    mpfr_neg(term, term, MPFR_RNDN);
    mpfr_add(sum, sum, term, MPFR_RNDN);
    if (mpfr_cmpabs(term, maxt) > 0) mpfr_abs(maxt, term, MPFR_RNDN);
    mpfr_mul_2si(tol, maxt, -static_cast<long>(prec) + 8, MPFR_RNDN);
    if (mpfr_cmpabs(term, tol) < 0 && k > static_cast<unsigned long>(x / 2)) break;
  }
  mpfr_set(out, sum, MPFR_RNDN);
  mpfr_clears(q, term, sum, maxt, tol, static_cast<mpfr_ptr>(nullptr));
}

}  // namespace detail

inline double bessel_j(int n, double x) {
  if (n < 0 || n > 2 || !(x > 0) || x > 5000)
    throw std::invalid_argument("oracle::bessel_j: out of supported range");
  const mpfr_prec_t prec = detail::prec_for(x);
  mpfr_t s;
  mpfr_init2(s, prec);
  detail::j_series(s, n, x, prec);
  const double v = mpfr_get_d(s, MPFR_RNDN);
  mpfr_clear(s);
  return v;
}

// Y0 = (2/pi)[(ln(x/2)+gamma) J0 + sum_{k>=1} (-1)^{k+1} H_k (x^2/4)^k / (k!)^2]
// Y1 = (2/pi)[(ln(x/2)+gamma) J1 - 1/x
//             - (x/4) sum_{k>=0} (-1)^k (H_k + H_{k+1}) (x^2/4)^k / (k!(k+1)!)]
inline double bessel_y(int n, double x) {
  if ((n != 0 && n != 1) || !(x > 0) || x > 5000)
    throw std::invalid_argument("oracle::bessel_y: out of supported range");
  const mpfr_prec_t prec = detail::prec_for(x);
  mpfr_t q, term, sum, maxt, tol, H, Hnext, j, lg, acc;
  mpfr_inits2(prec, q, term, sum, maxt, tol, H, Hnext, j, lg, acc,
              static_cast<mpfr_ptr>(nullptr));

  mpfr_set_d(q, x, MPFR_RNDN);
  mpfr_div_ui(q, q, 2, MPFR_RNDN);
  mpfr_sqr(q, q, MPFR_RNDN);

  mpfr_set_ui(sum, 0, MPFR_RNDN);
  mpfr_set_ui(maxt, 0, MPFR_RNDN);
  if (n == 0) {
    // term_k = (-1)^{k+1} H_k (x^2/4)^k / (k!)^2, starting at k=1
    mpfr_set_ui(H, 0, MPFR_RNDN);
    mpfr_set_ui(term, 1, MPFR_RNDN);  // carries (x^2/4)^k/(k!)^2 with sign
    for (unsigned long k = 1; k < 200000; ++k) {
      mpfr_mul(term, term, q, MPFR_RNDN);
      mpfr_div_ui(term, term, k * k, MPFR_RNDN);
      mpfr_neg(term, term, MPFR_RNDN);
      mpfr_set_ui(acc, 1, MPFR_RNDN);
      mpfr_div_ui(acc, acc, k, MPFR_RNDN);
      mpfr_add(H, H, acc, MPFR_RNDN);
      mpfr_mul(acc, term, H, MPFR_RNDN);
      mpfr_neg(acc, acc, MPFR_RNDN);  // (-1)^{k+1}
      mpfr_add(sum, sum, acc, MPFR_RNDN);
      if (mpfr_cmpabs(acc, maxt) > 0) mpfr_abs(maxt, acc, MPFR_RNDN);
      mpfr_mul_2si(tol, maxt, -static_cast<long>(prec) + 8, MPFR_RNDN);
      if (mpfr_cmpabs(acc, tol) < 0 && k > static_cast<unsigned long>(x / 2)) break;
    }
  } else {
    // sum_k (-1)^k (H_k + H_{k+1}) (x^2/4)^k / (k!(k+1)!), then * (-x/4)
    mpfr_set_ui(H, 0, MPFR_RNDN);
    mpfr_set_ui(Hnext, 1, MPFR_RNDN);
    mpfr_set_ui(term, 1, MPFR_RNDN);  // (x^2/4)^k/(k!(k+1)!) with sign
    for (unsigned long k = 0; k < 200000; ++k) {
      if (k > 0) {
        mpfr_mul(term, term, q, MPFR_RNDN);
        mpfr_div_ui(term, term, k, MPFR_RNDN);
        mpfr_div_ui(term, term, k + 1, MPFR_RNDN);
        mpfr_neg(term, term, MPFR_RNDN);
        mpfr_set_ui(acc, 1, MPFR_RNDN);
        mpfr_div_ui(acc, acc, k, MPFR_RNDN);
        mpfr_add(H, H, acc, MPFR_RNDN);
        mpfr_set_ui(acc, 1, MPFR_RNDN);
        mpfr_div_ui(acc, acc, k + 1, MPFR_RNDN);
        mpfr_add(Hnext, Hnext, acc, MPFR_RNDN);
      }
      mpfr_add(acc, H, Hnext, MPFR_RNDN);
      mpfr_mul(acc, acc, term, MPFR_RNDN);
      mpfr_add(sum, sum, acc, MPFR_RNDN);
      if (mpfr_cmpabs(acc, maxt) > 0) mpfr_abs(maxt, acc, MPFR_RNDN);
      mpfr_mul_2si(tol, maxt, -static_cast<long>(prec) + 8, MPFR_RNDN);
      if (mpfr_cmpabs(acc, tol) < 0 && k > static_cast<unsigned long>(x / 2 + 2)) break;
    }
    mpfr_mul_d(sum, sum, -x / 4, MPFR_RNDN);
    mpfr_set_d(acc, 1.0, MPFR_RNDN);
    mpfr_div_d(acc, acc, x, MPFR_RNDN);
    mpfr_sub(sum, sum, acc, MPFR_RNDN);
  }

  detail::j_series(j, n, x, prec);
  mpfr_set_d(lg, x, MPFR_RNDN);
  mpfr_div_ui(lg, lg, 2, MPFR_RNDN);
  mpfr_log(lg, lg, MPFR_RNDN);
  mpfr_const_euler(acc, MPFR_RNDN);
  mpfr_add(lg, lg, acc, MPFR_RNDN);
  mpfr_mul(lg, lg, j, MPFR_RNDN);
  mpfr_add(sum, sum, lg, MPFR_RNDN);

  mpfr_const_pi(acc, MPFR_RNDN);
  mpfr_ui_div(acc, 2, acc, MPFR_RNDN);
  mpfr_mul(sum, sum, acc, MPFR_RNDN);

  const double v = mpfr_get_d(sum, MPFR_RNDN);
  mpfr_clears(q, term, sum, maxt, tol, H, Hnext, j, lg, acc,
              static_cast<mpfr_ptr>(nullptr));
  return v;
}

}  // namespace oracle
