#pragma once

#include "katz/padic/ring.hpp"

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace katz {

/// x / p^shift, with x known modulo p^prec.
struct PadicNumber {
  u64 p = 2;
  mpz_class x = 0;
  int prec = 0;
  int shift = 0;

  /// Absolute precision of the value.
  int absolute_precision() const { return prec - shift; }
  /// v_p of the value; absolute_precision() if indistinguishable from zero.
  int valuation() const {
    if (x == 0) return absolute_precision();
    mpz_class t;
    mpz_class pz = static_cast<unsigned long>(p);
    int v = static_cast<int>(mpz_remove(t.get_mpz_t(), x.get_mpz_t(), pz.get_mpz_t()));
    return std::min(v, prec) - shift;
  }
  bool is_zero() const { return valuation() >= absolute_precision(); }
};

inline PadicNumber padic_normalize(PadicNumber a) {
  if (a.prec < 0) a.prec = 0;
  const mpz_class mod = mpz_pow(a.p, a.prec);
  mpz_fdiv_r(a.x.get_mpz_t(), a.x.get_mpz_t(), mod.get_mpz_t());
  if (a.shift < 0) {
    a.x *= mpz_pow(a.p, -a.shift);
    a.prec -= a.shift;
    a.shift = 0;
  }
  const mpz_class pz = static_cast<unsigned long>(a.p);
  while (a.shift > 0 && a.prec > 0 && a.x != 0 && mpz_divisible_p(a.x.get_mpz_t(), pz.get_mpz_t())) {
    a.x /= pz;
    --a.prec;
    --a.shift;
  }
  return a;
}

inline PadicNumber padic_from_int(u64 p, const mpz_class& v, int prec) { return padic_normalize({p, v, prec, 0}); }

/// n / d for integers with p not dividing d.
inline PadicNumber padic_from_fraction(u64 p, const mpz_class& n, const mpz_class& d, int prec) {
  const mpz_class mod = mpz_pow(p, prec);
  mpz_class inv;
  if (mpz_invert(inv.get_mpz_t(), d.get_mpz_t(), mod.get_mpz_t()) == 0) throw std::domain_error("padic_from_fraction: denominator divisible by p");
  return padic_normalize({p, n * inv, prec, 0});
}

inline PadicNumber padic_mul(const PadicNumber& a, const PadicNumber& b) {
  if (a.p != b.p) throw std::invalid_argument("padic_mul: different primes");
  // x_a x_b is known modulo p^(min(prec_a + v(x_b), prec_b + v(x_a)))
  const int va = a.valuation() + a.shift, vb = b.valuation() + b.shift;
  const int prec = std::min(a.prec + vb, b.prec + va);
  return padic_normalize({a.p, a.x * b.x, prec, a.shift + b.shift});
}

inline PadicNumber padic_add(PadicNumber a, PadicNumber b) {
  if (a.p != b.p) throw std::invalid_argument("padic_add: different primes");
  const int s = std::max(a.shift, b.shift);
  a.x *= mpz_pow(a.p, s - a.shift);
  a.prec += s - a.shift;
  b.x *= mpz_pow(b.p, s - b.shift);
  b.prec += s - b.shift;
  return padic_normalize({a.p, a.x + b.x, std::min(a.prec, b.prec), s});
}

inline PadicNumber padic_neg(PadicNumber a) {
  a.x = -a.x;
  return padic_normalize(a);
}

inline PadicNumber padic_sub(const PadicNumber& a, const PadicNumber& b) { return padic_add(a, padic_neg(b)); }

inline PadicNumber padic_div(const PadicNumber& a, const PadicNumber& b) {
  if (a.p != b.p) throw std::invalid_argument("padic_div: different primes");
  if (b.is_zero()) throw std::domain_error("padic_div: division by a number indistinguishable from zero");
  const u64 p = a.p;
  const int e = b.valuation() + b.shift;  // v_p(b.x)
  mpz_class u = b.x / mpz_pow(p, e);
  const int uprec = b.prec - e;
  const mpz_class mod = mpz_pow(p, uprec);
  mpz_class inv;
  mpz_invert(inv.get_mpz_t(), u.get_mpz_t(), mod.get_mpz_t());
  const int va = a.valuation() + a.shift;
  const int prec = std::min(a.prec, va + uprec);
  return padic_normalize({p, a.x * inv, prec, a.shift + e - b.shift});
}

inline bool padic_equal(const PadicNumber& a, const PadicNumber& b, int digits) {
  auto d = padic_sub(a, b);
  return d.valuation() >= digits;
}

/// Canonical representative of the value modulo p^digits (requires the value to be integral).
inline mpz_class padic_residue(const PadicNumber& a, int digits) {
  if (a.shift > 0) throw std::domain_error("padic_residue: value is not integral");
  if (digits > a.prec) throw std::domain_error("padic_residue: precision " + std::to_string(a.prec) + " below " + std::to_string(digits));
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), a.x.get_mpz_t(), mpz_pow(a.p, digits).get_mpz_t());
  return r;
}

// ---------------------------------------------------------------------------
// Lattice reduction (exact LLL, delta = 3/4) for the small dimensions used in
// algebraic recognition.

inline std::vector<std::vector<mpz_class>> lll_reduce(std::vector<std::vector<mpz_class>> b) {
  const std::size_t n = b.size();
  if (n == 0) return b;
  const std::size_t dim = b[0].size();
  std::vector<std::vector<mpq_class>> mu(n, std::vector<mpq_class>(n));
  std::vector<mpq_class> bb(n);
  std::vector<std::vector<mpq_class>> bs(n, std::vector<mpq_class>(dim));
  auto gso = [&]() {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t t = 0; t < dim; ++t) bs[i][t] = b[i][t];
      for (std::size_t j = 0; j < i; ++j) {
        mpq_class num = 0;
        for (std::size_t t = 0; t < dim; ++t) num += mpq_class(b[i][t]) * bs[j][t];
        mu[i][j] = bb[j] == 0 ? mpq_class(0) : mpq_class(num / bb[j]);
        for (std::size_t t = 0; t < dim; ++t) bs[i][t] -= mu[i][j] * bs[j][t];
      }
      bb[i] = 0;
      for (std::size_t t = 0; t < dim; ++t) bb[i] += bs[i][t] * bs[i][t];
    }
  };
  gso();
  const mpq_class delta(3, 4);
  std::size_t k = 1;
  std::size_t guard = 0;
  while (k < n) {
    if (++guard > 100000) throw std::runtime_error("lll_reduce: no convergence");
    for (std::size_t j = k; j-- > 0;) {
      mpq_class m = mu[k][j];
      // nearest integer
      mpz_class q = m.get_num() * 2 + m.get_den();
      mpz_class d2 = m.get_den() * 2;
      mpz_fdiv_q(q.get_mpz_t(), q.get_mpz_t(), d2.get_mpz_t());
      if (q != 0) {
        for (std::size_t t = 0; t < dim; ++t) b[k][t] -= q * b[j][t];
        gso();
      }
    }
    if (bb[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bb[k - 1]) {
      ++k;
    } else {
      std::swap(b[k], b[k - 1]);
      gso();
      k = std::max<std::size_t>(k - 1, 1);
    }
  }
  return b;
}

struct Recognition {
  int degree = 0;                   ///< 1: rational a/b, 2: quadratic
  std::vector<mpz_class> coeffs;    ///< c_0 + c_1 x (+ c_2 x^2) = 0, primitive, leading > 0
  int digits = 0;                   ///< p-adic digits the relation was sought at
  std::string text() const {
    if (degree == 1) {
      mpq_class r(-coeffs[0], coeffs[1]);
      r.canonicalize();
      return r.get_str();
    }
    std::string s;
    for (std::size_t i = coeffs.size(); i-- > 0;) {
      if (!s.empty()) s += ",";
      s += coeffs[i].get_str();
    }
    return "[" + s + "]";
  }
};

namespace detail {

inline mpz_class height(const std::vector<mpz_class>& v) {
  mpz_class h = 0;
  for (const auto& c : v) h = std::max(h, mpz_class(abs(c)));
  return h;
}

inline std::vector<mpz_class> primitive(std::vector<mpz_class> c) {
  mpz_class g = 0;
  for (const auto& x : c) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  if (g == 0) return c;
  for (auto& x : c) x /= g;
  if (c.back() < 0)
    for (auto& x : c) x = -x;
  return c;
}

}  // namespace detail

/// Shortest integer relation c_0 + c_1 x + ... + c_d x^d = 0 mod p^digits for
/// an integral p-adic x, with a height test: accepted when H^(d+1) < p^digits / 2^slack.
inline std::optional<Recognition> recognize_degree(const PadicNumber& a, int degree, int digits, int slack = 16) {
  if (a.shift > 0) throw std::domain_error("recognize: value is not integral");
  if (digits > a.prec) throw std::domain_error("recognize: not enough precision");
  if (degree < 1) throw std::invalid_argument("recognize: degree must be positive");
  const mpz_class mod = mpz_pow(a.p, digits);
  const std::size_t n = static_cast<std::size_t>(degree) + 1;
  std::vector<std::vector<mpz_class>> basis(n, std::vector<mpz_class>(n, 0));
  basis[0][0] = mod;
  mpz_class pw = 1;
  for (std::size_t i = 1; i < n; ++i) {
    pw = (pw * a.x) % mod;
    basis[i][0] = (mod - pw) % mod;
    basis[i][i] = 1;
  }
  auto red = lll_reduce(basis);
  std::optional<Recognition> best;
  for (const auto& v : red) {
    if (v.back() == 0) continue;
    auto c = detail::primitive(v);
    mpz_class val = 0, xp = 1;
    for (std::size_t i = 0; i < n; ++i) {
      val += c[i] * xp;
      xp = (xp * a.x) % mod;
    }
    if (val % mod != 0) continue;
    mpz_class h = detail::height(c);
    mpz_class lhs = 1;
    for (std::size_t i = 0; i < n; ++i) lhs *= h;
    lhs <<= slack;
    if (lhs >= mod) continue;
    if (!best || h < detail::height(best->coeffs)) best = Recognition{degree, c, digits};
  }
  return best;
}

/// Blind recognition: the lowest degree (up to max_degree) admitting a small relation.
inline std::optional<Recognition> recognize(const PadicNumber& a, int digits, int max_degree = 2) {
  for (int d = 1; d <= max_degree; ++d)
    if (auto r = recognize_degree(a, d, digits)) return r;
  return std::nullopt;
}

}  // namespace katz
