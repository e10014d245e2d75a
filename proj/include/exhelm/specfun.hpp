#pragma once

// Real-argument Bessel functions J0, J1, Y0, Y1 and the first-kind Hankel
// functions of order 0 and 1, in double precision.
//
// Classical two-regime scheme: for x <= 8, minimax rational approximations
// on root-bracketing intervals, so relative accuracy survives near the
// zeros; for x > 8, amplitude-phase asymptotic forms with rational
// corrections.  The rational coefficients and root splittings are the
// published Boost.Math ones (Copyright (c) 2006 Xiaogang Zhang, Boost
// Software License 1.0); evaluation code is ours.  Two local refinements
// on top of the stock scheme:
//   - the asymptotic phase x - pi/4 (resp. x - 3pi/4) is formed in
//     double-double so sin/cos keep relative accuracy near the large-x
//     zeros of the functions;
//   - the log factor in Y0/Y1 near their small-x zeros goes through
//     log1p against the split root instead of log(x/root).

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "exhelm/geometry.hpp"

namespace exhelm::specfun {

namespace detail {

// P(y)/Q(y) for equal-length coefficient arrays, constant term first.
// Evaluated in 1/y when y > 1 so the huge leading coefficients cannot
// overflow intermediates.
template <std::size_t N>
inline double rational(const double (&p)[N], const double (&q)[N], double y) {
  if (y <= 1.0) {
    double np = p[N - 1], nq = q[N - 1];
    for (int i = static_cast<int>(N) - 2; i >= 0; --i) {
      np = np * y + p[i];
      nq = nq * y + q[i];
    }
    return np / nq;
  }
  const double z = 1.0 / y;
  double np = p[0], nq = q[0];
  for (std::size_t i = 1; i < N; ++i) {
    np = np * z + p[i];
    nq = nq * z + q[i];
  }
  return np / nq;
}

struct SinCos {
  double s, c;
};

// sin/cos of x - (c_hi + c_lo) with the subtraction carried in
// double-double; valid for x > c_hi > 0.  libm's sin/cos do exact argument
// reduction, so the result keeps relative accuracy near zeros of the
// shifted phase.
inline SinCos sincos_shifted(double x, double c_hi, double c_lo) {
  const double zh = x - c_hi;
  const double err = (x - zh) - c_hi;  // exact (Dekker)
  const double zl = err - c_lo;
  const double s = std::sin(zh);
  const double c = std::cos(zh);
  return {s + zl * c, c - zl * s};
}

// log(x / root) where root = r256/256 + r_lo and r256/256 is exact in
// binary; relative accuracy holds arbitrarily close to the root.
inline double log_ratio(double x, double r256, double r_lo, double root) {
  return std::log1p(((x - r256 / 256) - r_lo) / root);
}

inline constexpr double kQuarterPiHi = 0.7853981633974483;
inline constexpr double kQuarterPiLo = 3.061616997868383e-17;
inline constexpr double kThreeQuarterPiHi = 2.356194490192345;
inline constexpr double kThreeQuarterPiLo = 9.184850993605148e-17;
inline constexpr double kSqrtTwoOverPi = 0.7978845608028654;
inline constexpr double kTwoOverPi = 0.6366197723675814;

// ---- order 0, x <= 8 ----

inline constexpr double kJ0P1[7] = {
    -4.1298668500990866786e+11, 2.7282507878605942706e+10, -6.2140700423540120665e+08,
    6.6302997904833794242e+06, -3.6629814655107086448e+04, 1.0344222815443188943e+02,
    -1.2117036164593528341e-01};
inline constexpr double kJ0Q1[7] = {
    2.3883787996332290397e+12, 2.6328198300859648632e+10, 1.3985097372263433271e+08,
    4.5612696224219938200e+05, 9.3614022392337710626e+02, 1.0, 0.0};
inline constexpr double kJ0P2[8] = {
    -1.8319397969392084011e+03, -1.2254078161378989535e+04, -7.2879702464464618998e+03,
    1.0341910641583726701e+04, 1.1725046279757103576e+04, 4.4176707025325087628e+03,
    7.4321196680624245801e+02, 4.8591703355916499363e+01};
inline constexpr double kJ0Q2[8] = {
    -3.5783478026152301072e+05, 2.4599102262586308984e+05, -8.4055062591169562211e+04,
    1.8680990008359188352e+04, -2.9458766545509337327e+03, 3.3307310774649071172e+02,
    -2.5258076240801555057e+01, 1.0};

inline constexpr double kY0P1[6] = {
    1.0723538782003176831e+11, -8.3716255451260504098e+09, 2.0422274357376619816e+08,
    -2.1287548474401797963e+06, 1.0102532948020907590e+04, -1.8402381979244993524e+01};
inline constexpr double kY0Q1[6] = {
    5.8873865738997033405e+11, 8.1617187777290363573e+09, 5.5662956624278251596e+07,
    2.3889393209447253406e+05, 6.6475986689240190091e+02, 1.0};
inline constexpr double kY0P2[7] = {
    -2.2213976967566192242e+13, -5.5107435206722644429e+11, 4.3600098638603061642e+10,
    -6.9590439394619619534e+08, 4.6905288611678631510e+06, -1.4566865832663635920e+04,
    1.7427031242901594547e+01};
inline constexpr double kY0Q2[7] = {
    4.3386146580707264428e+14, 5.4266824419412347550e+12, 3.4015103849971240096e+10,
    1.3960202770986831075e+08, 4.0669982352539552018e+05, 8.3030857612070288823e+02,
    1.0};
inline constexpr double kY0P3[8] = {
    -8.0728726905150210443e+15, 6.7016641869173237784e+14, -1.2829912364088687306e+11,
    -1.9363051266772083678e+11, 2.1958827170518100757e+09, -1.0085539923498211426e+07,
    2.1363534169313901632e+04, -1.7439661319197499338e+01};
inline constexpr double kY0Q3[8] = {
    3.4563724628846457519e+17, 3.9272425569640309819e+15, 2.2598377924042897629e+13,
    8.6926121104209825246e+10, 2.4727219475672302327e+08, 5.3924739209768057030e+05,
    8.7903362168128450017e+02, 1.0};

// ---- order 0, asymptotic modulus/phase rationals (shared by J0 and Y0) ----

inline constexpr double kC0P[6] = {
    2.2779090197304684302e+04, 4.1345386639580765797e+04, 2.1170523380864944322e+04,
    3.4806486443249270347e+03, 1.5376201909008354296e+02, 8.8961548424210455236e-01};
inline constexpr double kC0Q[6] = {
    2.2779090197304684318e+04, 4.1370412495510416640e+04, 2.1215350561880115730e+04,
    3.5028735138235608207e+03, 1.5711159858080893649e+02, 1.0};
inline constexpr double kS0P[6] = {
    -8.9226600200800094098e+01, -1.8591953644342993800e+02, -1.1183429920482737611e+02,
    -2.2300261666214198472e+01, -1.2441026745835638459e+00, -8.8033303048680751817e-03};
inline constexpr double kS0Q[6] = {
    5.7105024128512061905e+03, 1.1951131543434613647e+04, 7.2642780169211018836e+03,
    1.4887231232283756582e+03, 9.0593769594993125859e+01, 1.0};

// ---- order 1, x <= 8 ----

inline constexpr double kJ1P1[7] = {
    -1.4258509801366645672e+11, 6.6781041261492395835e+09, -1.1548696764841276794e+08,
    9.8062904098958257677e+05, -4.4615792982775076130e+03, 1.0650724020080236441e+01,
    -1.0767857011487300348e-02};
inline constexpr double kJ1Q1[7] = {
    4.1868604460820175290e+12, 4.2091902282580133541e+10, 2.0228375140097033958e+08,
    5.9117614494174794095e+05, 1.0742272239517380498e+03, 1.0, 0.0};
inline constexpr double kJ1P2[8] = {
    -1.7527881995806511112e+16, 1.6608531731299018674e+15, -3.6658018905416665164e+13,
    3.5580665670910619166e+11, -1.8113931269860667829e+09, 5.0793266148011179143e+06,
    -7.5023342220781607561e+03, 4.6179191852758252278e+00};
inline constexpr double kJ1Q2[8] = {
    1.7253905888447681194e+18, 1.7128800897135812012e+16, 8.4899346165481429307e+13,
    2.7622777286244082666e+11, 6.4872502899596389593e+08, 1.1267125065029138050e+06,
    1.3886978985861357615e+03, 1.0};

inline constexpr double kY1P1[7] = {
    4.0535726612579544093e+13, 5.4708611716525426053e+12, -3.7595974497819597599e+11,
    7.2144548214502560419e+09, -5.9157479997408395984e+07, 2.2157953222280260820e+05,
    -3.1714424660046133456e+02};
inline constexpr double kY1Q1[7] = {
    3.0737873921079286084e+14, 4.1272286200406461981e+12, 2.7800352738690585613e+10,
    1.2250435122182963220e+08, 3.8136470753052572164e+05, 8.2079908168393867438e+02,
    1.0};
inline constexpr double kY1P2[9] = {
    1.1514276357909013326e+19, -5.6808094574724204577e+18, -2.3638408497043134724e+16,
    4.0686275289804744814e+15, -5.9530713129741981618e+13, 3.7453673962438488783e+11,
    -1.1957961912070617006e+09, 1.9153806858264202986e+06, -1.2337180442012953128e+03};
inline constexpr double kY1Q2[9] = {
    5.3321844313316185697e+20, 5.6968198822857178911e+18, 3.0837179548112881950e+16,
    1.1187010065856971027e+14, 3.0221766852960403645e+11, 6.3550318087088919566e+08,
    1.0453748201934079734e+06, 1.2855164849321609336e+03, 1.0};

// ---- order 1, asymptotic rationals (shared by J1 and Y1) ----

inline constexpr double kC1P[7] = {
    -4.4357578167941278571e+06, -9.9422465050776411957e+06, -6.6033732483649391093e+06,
    -1.5235293511811373833e+06, -1.0982405543459346727e+05, -1.6116166443246101165e+03,
    0.0};
inline constexpr double kC1Q[7] = {
    -4.4357578167941278568e+06, -9.9341243899345856590e+06, -6.5853394797230870728e+06,
    -1.5118095066341608816e+06, -1.0726385991103820119e+05, -1.4550094401904961825e+03,
    1.0};
inline constexpr double kS1P[7] = {
    3.3220913409857223519e+04, 8.5145160675335701966e+04, 6.6178836581270835179e+04,
    1.8494262873223866797e+04, 1.7063754290207680021e+03, 3.5265133846636032186e+01,
    0.0};
inline constexpr double kS1Q[7] = {
    7.0871281941028743574e+05, 1.8194580422439972989e+06, 1.4194606696037208929e+06,
    4.0029443582266975117e+05, 3.7890229745772202641e+04, 8.6383677696049909675e+02,
    1.0};

// Roots as (leading/256 exact, residual) splits plus the rounded double.
inline constexpr double kJ0R1a = 616.0, kJ0R1b = -1.42444230422723137837e-03,
                        kJ0R1 = 2.4048255576957727686e+00;
inline constexpr double kJ0R2a = 1413.0, kJ0R2b = 5.46860286310649596604e-04,
                        kJ0R2 = 5.5200781102863106496e+00;
inline constexpr double kJ1R1a = 981.0, kJ1R1b = -3.2527979248768438556e-04,
                        kJ1R1 = 3.8317059702075123156e+00;
inline constexpr double kJ1R2a = 1796.0, kJ1R2b = -3.8330184381246462950e-05,
                        kJ1R2 = 7.0155866698156187535e+00;
inline constexpr double kY0R1a = 228.0, kY0R1b = 2.9519662791675215849e-03,
                        kY0R1 = 8.9357696627916752158e-01;
inline constexpr double kY0R2a = 1013.0, kY0R2b = 6.4716931485786837568e-04,
                        kY0R2 = 3.9576784193148578684e+00;
inline constexpr double kY0R3a = 1814.0, kY0R3b = 1.1356030177269762362e-04,
                        kY0R3 = 7.0860510603017726976e+00;
inline constexpr double kY1R1a = 562.0, kY1R1b = 1.8288260310170351490e-03,
                        kY1R1 = 2.1971413260310170351e+00;
inline constexpr double kY1R2a = 1390.0, kY1R2b = -6.4592058648672279948e-06,
                        kY1R2 = 5.4296810407941351328e+00;

inline double j0_unchecked(double x) {
  if (x <= 4.0) {
    const double r = rational(kJ0P1, kJ0Q1, x * x);
    return (x + kJ0R1) * ((x - kJ0R1a / 256) - kJ0R1b) * r;
  }
  if (x <= 8.0) {
    const double r = rational(kJ0P2, kJ0Q2, 1.0 - x * x / 64);
    return (x + kJ0R2) * ((x - kJ0R2a / 256) - kJ0R2b) * r;
  }
  const double y = 8.0 / x, y2 = y * y;
  const double rc = rational(kC0P, kC0Q, y2);
  const double rs = rational(kS0P, kS0Q, y2);
  const auto [sz, cz] = sincos_shifted(x, kQuarterPiHi, kQuarterPiLo);
  return kSqrtTwoOverPi / std::sqrt(x) * (rc * cz - y * rs * sz);
}

inline double j1_unchecked(double x) {
  if (x <= 4.0) {
    const double r = rational(kJ1P1, kJ1Q1, x * x);
    return x * (x + kJ1R1) * ((x - kJ1R1a / 256) - kJ1R1b) * r;
  }
  if (x <= 8.0) {
    const double r = rational(kJ1P2, kJ1Q2, x * x);
    return x * (x + kJ1R2) * ((x - kJ1R2a / 256) - kJ1R2b) * r;
  }
  const double y = 8.0 / x, y2 = y * y;
  const double rc = rational(kC1P, kC1Q, y2);
  const double rs = rational(kS1P, kS1Q, y2);
  const auto [sz, cz] = sincos_shifted(x, kThreeQuarterPiHi, kThreeQuarterPiLo);
  return kSqrtTwoOverPi / std::sqrt(x) * (rc * cz - y * rs * sz);
}

inline double y0_unchecked(double x) {
  if (x <= 3.0) {
    const double z = kTwoOverPi * log_ratio(x, kY0R1a, kY0R1b, kY0R1) * j0_unchecked(x);
    const double r = rational(kY0P1, kY0Q1, x * x);
    return z + (x + kY0R1) * ((x - kY0R1a / 256) - kY0R1b) * r;
  }
  if (x <= 5.5) {
    const double z = kTwoOverPi * log_ratio(x, kY0R2a, kY0R2b, kY0R2) * j0_unchecked(x);
    const double r = rational(kY0P2, kY0Q2, x * x);
    return z + (x + kY0R2) * ((x - kY0R2a / 256) - kY0R2b) * r;
  }
  if (x <= 8.0) {
    const double z = kTwoOverPi * log_ratio(x, kY0R3a, kY0R3b, kY0R3) * j0_unchecked(x);
    const double r = rational(kY0P3, kY0Q3, x * x);
    return z + (x + kY0R3) * ((x - kY0R3a / 256) - kY0R3b) * r;
  }
  const double y = 8.0 / x, y2 = y * y;
  const double rc = rational(kC0P, kC0Q, y2);
  const double rs = rational(kS0P, kS0Q, y2);
  const auto [sz, cz] = sincos_shifted(x, kQuarterPiHi, kQuarterPiLo);
  return kSqrtTwoOverPi / std::sqrt(x) * (rc * sz + y * rs * cz);
}

inline double y1_unchecked(double x) {
  if (x <= 4.0) {
    const double z = kTwoOverPi * log_ratio(x, kY1R1a, kY1R1b, kY1R1) * j1_unchecked(x);
    const double r = rational(kY1P1, kY1Q1, x * x);
    return z + (x + kY1R1) * ((x - kY1R1a / 256) - kY1R1b) / x * r;
  }
  if (x <= 8.0) {
    const double z = kTwoOverPi * log_ratio(x, kY1R2a, kY1R2b, kY1R2) * j1_unchecked(x);
    const double r = rational(kY1P2, kY1Q2, x * x);
    return z + (x + kY1R2) * ((x - kY1R2a / 256) - kY1R2b) / x * r;
  }
  const double y = 8.0 / x, y2 = y * y;
  const double rc = rational(kC1P, kC1Q, y2);
  const double rs = rational(kS1P, kS1Q, y2);
  const auto [sz, cz] = sincos_shifted(x, kThreeQuarterPiHi, kThreeQuarterPiLo);
  return kSqrtTwoOverPi / std::sqrt(x) * (rc * sz + y * rs * cz);
}

inline void check_arg(double x, const char* fn) {
  if (!std::isfinite(x) || x <= 0.0 || x > 1e6)
    throw std::domain_error(std::string(fn) + ": argument must be finite, > 0 and <= 1e6, got " +
                            std::to_string(x));
}

}  // namespace detail

inline double bessel_j0(double x) {
  detail::check_arg(x, "bessel_j0");
  return detail::j0_unchecked(x);
}

inline double bessel_j1(double x) {
  detail::check_arg(x, "bessel_j1");
  return detail::j1_unchecked(x);
}

inline double bessel_y0(double x) {
  detail::check_arg(x, "bessel_y0");
  return detail::y0_unchecked(x);
}

inline double bessel_y1(double x) {
  detail::check_arg(x, "bessel_y1");
  return detail::y1_unchecked(x);
}

/// H_order^(1)(x) = J_order(x) + i Y_order(x); order must be 0 or 1.
inline Complex hankel1(int order, double x) {
  if (order != 0 && order != 1)
    throw std::invalid_argument("hankel1: unsupported order " + std::to_string(order));
  detail::check_arg(x, "hankel1");
  if (order == 0) return {detail::j0_unchecked(x), detail::y0_unchecked(x)};
  return {detail::j1_unchecked(x), detail::y1_unchecked(x)};
}

}  // namespace exhelm::specfun
