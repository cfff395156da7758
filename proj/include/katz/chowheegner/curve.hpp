#pragma once

#include "katz/padic/recognize.hpp"
#include "katz/padic/ring.hpp"

#include <gmpxx.h>

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace katz {

/// A rational point; nullopt coordinates = the point at infinity.
struct CurvePoint {
  bool infinity = true;
  mpq_class x = 0, y = 0;
  static CurvePoint at_infinity() { return {}; }
  static CurvePoint affine(mpq_class x, mpq_class y) { return {false, std::move(x), std::move(y)}; }
};

struct CurveModel {
  std::array<mpz_class, 5> a{};  ///< a1, a2, a3, a4, a6
  long conductor = 0;            ///< informational
  CurvePoint generator;

  const mpz_class& a1() const { return a[0]; }
  const mpz_class& a2() const { return a[1]; }
  const mpz_class& a3() const { return a[2]; }
  const mpz_class& a4() const { return a[3]; }
  const mpz_class& a6() const { return a[4]; }

  bool contains(const CurvePoint& P) const {
    if (P.infinity) return true;
    mpq_class lhs = P.y * P.y + mpq_class(a1()) * P.x * P.y + mpq_class(a3()) * P.y;
    mpq_class rhs = P.x * P.x * P.x + mpq_class(a2()) * P.x * P.x + mpq_class(a4()) * P.x + mpq_class(a6());
    return lhs == rhs;
  }

  CurvePoint negate(const CurvePoint& P) const {
    if (P.infinity) return P;
    return CurvePoint::affine(P.x, -P.y - mpq_class(a1()) * P.x - mpq_class(a3()));
  }

  CurvePoint add(const CurvePoint& P, const CurvePoint& Q) const {
    if (P.infinity) return Q;
    if (Q.infinity) return P;
    mpq_class lambda, nu;
    if (P.x == Q.x) {
      if (P.y + Q.y + mpq_class(a1()) * Q.x + mpq_class(a3()) == 0) return CurvePoint::at_infinity();
      mpq_class num = 3 * P.x * P.x + 2 * mpq_class(a2()) * P.x + mpq_class(a4()) - mpq_class(a1()) * P.y;
      mpq_class den = 2 * P.y + mpq_class(a1()) * P.x + mpq_class(a3());
      lambda = num / den;
      nu = (-P.x * P.x * P.x + mpq_class(a4()) * P.x + 2 * mpq_class(a6()) - mpq_class(a3()) * P.y) / den;
    } else {
      lambda = (Q.y - P.y) / (Q.x - P.x);
      nu = (P.y * Q.x - Q.y * P.x) / (Q.x - P.x);
    }
    mpq_class x3 = lambda * lambda + mpq_class(a1()) * lambda - mpq_class(a2()) - P.x - Q.x;
    mpq_class y3 = -(lambda + mpq_class(a1())) * x3 - nu - mpq_class(a3());
    return CurvePoint::affine(x3, y3);
  }

  CurvePoint multiply(const CurvePoint& P, long k) const {
    if (k < 0) return multiply(negate(P), -k);
    CurvePoint r = CurvePoint::at_infinity(), b = P;
    while (k > 0) {
      if (k & 1) r = add(r, b);
      b = add(b, b);
      k >>= 1;
    }
    return r;
  }
};

/// Coefficients w_0..w_{len-1} of the invariant differential
/// omega = (w_0 + w_1 t + ...) dt in the parameter t = -x/y (all integers).
inline std::vector<mpz_class> invariant_differential(const CurveModel& e, std::size_t len) {
  if (len == 0) return {};
  // w(t) = t^3 u(t) solves w = t^3 + a1 t w + a2 t^2 w + a3 w^2 + a4 t w^2 + a6 w^3
  const std::size_t n = len + 1;
  auto mul = [&](const std::vector<mpz_class>& x, const std::vector<mpz_class>& y) {
    std::vector<mpz_class> z(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      if (x[i] != 0)
        for (std::size_t j = 0; i + j < n; ++j) z[i + j] += x[i] * y[j];
    return z;
  };
  // in terms of u: u = 1 + a1 t u + a2 t^2 u + a3 t^3 u^2 + a4 t^4 u^2 + a6 t^6 u^3
  std::vector<mpz_class> u(n, 0);
  u[0] = 1;
  for (std::size_t it = 0; it <= n; ++it) {
    auto u2 = mul(u, u), u3 = mul(u2, u);
    std::vector<mpz_class> nu(n, 0);
    nu[0] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (i + 1 < n) nu[i + 1] += e.a1() * u[i];
      if (i + 2 < n) nu[i + 2] += e.a2() * u[i];
      if (i + 3 < n) nu[i + 3] += e.a3() * u2[i];
      if (i + 4 < n) nu[i + 4] += e.a4() * u2[i];
      if (i + 6 < n) nu[i + 6] += e.a6() * u3[i];
    }
    if (nu == u) break;
    u = std::move(nu);
  }
  // omega = (2u + t u') / (2u - a1 t u - a3 t^3 u^2) dt
  auto u2 = mul(u, u);
  std::vector<mpq_class> num(n), den(n);
  for (std::size_t i = 0; i < n; ++i) {
    num[i] = mpq_class(2 * u[i] + static_cast<long>(i) * u[i]);
    den[i] = mpq_class(2 * u[i]);
    if (i >= 1) den[i] -= mpq_class(e.a1() * u[i - 1]);
    if (i >= 3) den[i] -= mpq_class(e.a3() * u2[i - 3]);
  }
  std::vector<mpq_class> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    mpq_class s = num[i];
    for (std::size_t j = 0; j < i; ++j) s -= q[j] * den[i - j];
    q[i] = s / den[0];
  }
  std::vector<mpz_class> out(len);
  for (std::size_t i = 0; i < len; ++i) {
    if (q[i].get_den() != 1) throw std::logic_error("invariant_differential: non-integral coefficient");
    out[i] = q[i].get_num();
  }
  return out;
}

/// L(t) = sum_{n >= 1} w_{n-1} t^n / n, coefficients 1..len (index 0 is 0).
inline std::vector<mpq_class> formal_log(const CurveModel& e, std::size_t len) {
  auto w = invariant_differential(e, len);
  std::vector<mpq_class> l(len + 1, 0);
  for (std::size_t n = 1; n <= len; ++n) {
    l[n] = mpq_class(w[n - 1], static_cast<long>(n));
    l[n].canonicalize();
  }
  return l;
}

/// Number of log terms so that t^n/n with v(t) >= 1 is below p^digits beyond it.
inline std::size_t log_length(u64 p, int digits) {
  std::size_t n = 1;
  auto tail_ok = [&](std::size_t k) {
    // v(t^j / j) >= j - log_p j for all j > k
    for (std::size_t j = k + 1; j <= k + 64; ++j) {
      std::size_t vj = 0;
      for (std::size_t t = j; t % p == 0; t /= p) ++vj;
      if (static_cast<long>(j) - static_cast<long>(vj) < digits) return false;
    }
    return true;
  };
  while (!tail_ok(n)) ++n;
  return n + 2;
}

struct LogResult {
  PadicNumber value;       ///< log_E(P)
  long multiplier = 1;     ///< M with M P in the formal group
  int t_valuation = 0;     ///< v_p(t(M P))
  std::size_t terms = 0;
};

/// v_p of a nonzero rational.
inline int rational_valuation(u64 p, const mpq_class& q) {
  if (q == 0) throw std::domain_error("valuation of zero");
  mpz_class t;
  mpz_class pz = static_cast<unsigned long>(p);
  int vn = static_cast<int>(mpz_remove(t.get_mpz_t(), q.get_num_mpz_t(), pz.get_mpz_t()));
  int vd = static_cast<int>(mpz_remove(t.get_mpz_t(), q.get_den_mpz_t(), pz.get_mpz_t()));
  return vn - vd;
}

/// Formal logarithm of a point: the smallest multiplier M <= max_multiplier
/// with MP reducing to the origin (v_p(x) < 0), then L(t(MP)) / M, to p^digits.
inline LogResult padic_log_point(const CurveModel& e, const CurvePoint& P, u64 p, int digits, long max_multiplier = 50) {
  if (!e.contains(P)) throw std::invalid_argument("padic_log_point: point not on the curve");
  LogResult out;
  out.value = padic_from_int(p, 0, digits);
  if (P.infinity) return out;
  CurvePoint Q = CurvePoint::at_infinity();
  for (long M = 1; M <= max_multiplier; ++M) {
    Q = e.add(Q, P);
    if (Q.infinity) throw std::domain_error("padic_log_point: the point is torsion (order " + std::to_string(M) + ")");
    // membership in the formal group is v(x) < 0; v(t) >= 1 alone admits integral points
    if (Q.x == 0 || rational_valuation(p, Q.x) >= 0) continue;
    mpq_class t = -Q.x / Q.y;
    const int vt = rational_valuation(p, t);
    int vm = 0;
    for (long k = M; k % static_cast<long>(p) == 0; k /= static_cast<long>(p)) ++vm;
    const int work = digits + vm;
    const std::size_t len = log_length(p, work);
    auto l = formal_log(e, len);
    // sum of l_n t^n with l_n = w_{n-1}/n; track the p-part of n separately
    PadicNumber acc = padic_from_int(p, 0, work);
    const PadicNumber tp = padic_from_fraction(p, t.get_num(), t.get_den(), work + 64);
    PadicNumber tn = padic_from_int(p, 1, work + 64);
    for (std::size_t n = 1; n <= len; ++n) {
      tn = padic_mul(tn, tp);
      if (l[n] == 0) continue;
      const auto& num = l[n].get_num();
      const auto& den = l[n].get_den();
      int vden = 0;
      mpz_class dunit = den;
      while (mpz_divisible_ui_p(dunit.get_mpz_t(), p)) {
        dunit /= static_cast<unsigned long>(p);
        ++vden;
      }
      PadicNumber coef = padic_from_fraction(p, num, dunit, work + 64);
      coef.shift = vden;
      coef = padic_normalize(coef);
      auto term = padic_mul(coef, tn);
      acc = padic_add(acc, term);
    }
    acc.prec = std::min(acc.prec, work + acc.shift);
    acc = padic_normalize(acc);
    out.value = padic_div(acc, padic_from_int(p, M, work + 64));
    out.value.prec = std::min(out.value.prec, digits + out.value.shift);
    out.value = padic_normalize(out.value);
    out.multiplier = M;
    out.t_valuation = vt;
    out.terms = len;
    return out;
  }
  throw std::domain_error("padic_log_point: no multiplier up to " + std::to_string(max_multiplier) + " maps the point into the formal group");
}

}  // namespace katz
