#pragma once

#include "katz/padic/ring.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace katz {

/// Truncated q-expansion a_0 + a_1 q + ... + a_{T-1} q^{T-1} over R.
/// The q-precision is the vector length.
template <class R>
using Series = std::vector<typename R::value_type>;

template <class R>
Series<R> series_zero(const R& ring, std::size_t t) { return Series<R>(t, ring.zero()); }

template <class R>
Series<R> series_one(const R& ring, std::size_t t) {
  auto s = series_zero(ring, t);
  if (t) s[0] = ring.one();
  return s;
}

template <class R>
Series<R> series_from_ints(const R& ring, const std::vector<long long>& c, std::size_t t) {
  auto s = series_zero(ring, t);
  for (std::size_t i = 0; i < std::min(t, c.size()); ++i) s[i] = ring.from_int(c[i]);
  return s;
}

template <class R>
Series<R> series_add(const R& ring, const Series<R>& a, const Series<R>& b) {
  std::size_t t = std::min(a.size(), b.size());
  Series<R> out(t);
  for (std::size_t i = 0; i < t; ++i) out[i] = ring.add(a[i], b[i]);
  return out;
}

template <class R>
Series<R> series_sub(const R& ring, const Series<R>& a, const Series<R>& b) {
  std::size_t t = std::min(a.size(), b.size());
  Series<R> out(t);
  for (std::size_t i = 0; i < t; ++i) out[i] = ring.sub(a[i], b[i]);
  return out;
}

template <class R>
Series<R> series_scale(const R& ring, const Series<R>& a, const typename R::value_type& c) {
  Series<R> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = ring.mul(a[i], c);
  return out;
}

template <class R>
bool series_equal(const R& ring, const Series<R>& a, const Series<R>& b) {
  std::size_t t = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < t; ++i)
    if (!ring.equal(a[i], b[i])) return false;
  return true;
}

/// Index of the first coefficient that is nonzero mod p, or size() if none.
template <class R>
std::size_t leading_unit(const R& ring, const Series<R>& a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!ring.is_zero(a[i]) && ring.valuation(a[i]) == 0) return i;
  return a.size();
}

/// Minimum valuation of the coefficients (ring digits if all zero).
template <class R>
int series_valuation(const R& ring, const Series<R>& a) {
  int v = ring.digits();
  for (const auto& c : a) v = std::min(v, ring.valuation(c));
  return v;
}

/// Product truncated to t terms (default: the shorter precision).
template <class R>
Series<R> series_mul(const R& ring, const Series<R>& a, const Series<R>& b, std::size_t t = 0) {
  if (t == 0) t = std::min(a.size(), b.size());
  t = std::min(t, std::min(a.size(), b.size()));
  std::vector<typename R::Acc> acc(t, ring.acc_zero());
  std::size_t b_lo = 0;
  while (b_lo < t && ring.is_zero(b[b_lo])) ++b_lo;
  for (std::size_t i = 0; i + b_lo < t; ++i) {
    const auto& ai = a[i];
    if (ring.is_zero(ai)) continue;
    const std::size_t lim = t - i;
    auto* out = acc.data() + i;
    for (std::size_t j = b_lo; j < lim; ++j) ring.fma(out[j], ai, b[j]);
  }
  Series<R> out(t);
  for (std::size_t i = 0; i < t; ++i) out[i] = ring.reduce(acc[i]);
  return out;
}

/// Inverse of a series with unit constant term.
template <class R>
Series<R> series_inverse(const R& ring, const Series<R>& a, std::size_t t = 0) {
  if (t == 0) t = a.size();
  t = std::min(t, a.size());
  if (t == 0) return {};
  if (ring.valuation(a[0]) != 0) throw std::domain_error("series_inverse: constant term is not a unit");
  auto inv0 = ring.inverse(a[0]);
  Series<R> b(t);
  b[0] = inv0;
  for (std::size_t n = 1; n < t; ++n) {
    auto acc = ring.acc_zero();
    for (std::size_t i = 1; i <= n; ++i) ring.fma(acc, a[i], b[n - i]);
    b[n] = ring.neg(ring.mul(ring.reduce(acc), inv0));
  }
  return b;
}

/// a^e for any integer e (negative powers need a unit constant term).
template <class R>
Series<R> series_pow(const R& ring, const Series<R>& a, long long e, std::size_t t = 0) {
  if (t == 0) t = a.size();
  Series<R> base = e < 0 ? series_inverse(ring, a, t) : Series<R>(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(std::min(t, a.size())));
  unsigned long long k = e < 0 ? static_cast<unsigned long long>(-e) : static_cast<unsigned long long>(e);
  Series<R> r = series_one(ring, base.size());
  while (k) {
    if (k & 1) r = series_mul(ring, r, base);
    k >>= 1;
    if (k) base = series_mul(ring, base, base);
  }
  return r;
}

/// (U_p f)(q) = sum a_{pj} q^j, precision ceil(T/p).
template <class R>
Series<R> u_operator(const R& ring, const Series<R>& f, u64 p) {
  (void)ring;
  std::size_t t = (f.size() + p - 1) / p;
  Series<R> out(t);
  for (std::size_t j = 0; j < t; ++j) out[j] = f[j * p];
  return out;
}

/// (V_p f)(q) = f(q^p), same precision.
template <class R>
Series<R> v_operator(const R& ring, const Series<R>& f, u64 p) {
  auto out = series_zero(ring, f.size());
  for (std::size_t j = 0; j * p < f.size(); ++j) out[j * p] = f[j];
  return out;
}

/// Zero every coefficient whose index is divisible by p.
template <class R>
Series<R> p_deplete(const R& ring, const Series<R>& f, u64 p) {
  Series<R> out = f;
  for (std::size_t j = 0; j < out.size(); j += p) out[j] = ring.zero();
  return out;
}

/// theta = q d/dq.
template <class R>
Series<R> theta(const R& ring, const Series<R>& f) {
  Series<R> out(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) out[j] = ring.mul(f[j], ring.from_int(static_cast<long long>(j)));
  return out;
}

/// Formal antiderivative a_j -> a_j / j on p-depleted series.
template <class R>
Series<R> theta_inverse(const R& ring, const Series<R>& f) {
  const u64 p = ring.p();
  Series<R> out = series_zero(ring, f.size());
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (j % p == 0) {
      if (!ring.is_zero(f[j])) throw std::domain_error("theta_inverse: series is not p-depleted");
      continue;
    }
    out[j] = ring.mul(f[j], ring.inverse(ring.from_int(static_cast<long long>(j))));
  }
  return out;
}

/// Hecke operator T_ell in weight k on Gamma_0(N), ell not dividing pN.
template <class R>
Series<R> hecke_T(const R& ring, const Series<R>& f, u64 ell, int k, u64 level) {
  if (!is_prime(ell)) throw std::invalid_argument("hecke_T: ell must be prime");
  if (level % ell == 0 || ring.p() == ell) throw std::invalid_argument("hecke_T: ell divides pN");
  std::size_t t = f.size() / ell;
  auto lk = ring.one();
  for (int i = 0; i < k - 1; ++i) lk = ring.mul(lk, ring.from_int(static_cast<long long>(ell)));
  Series<R> out(t);
  for (std::size_t j = 0; j < t; ++j) {
    out[j] = f[ell * j];
    if (j % ell == 0) out[j] = ring.add(out[j], ring.mul(lk, f[j / ell]));
  }
  return out;
}

/// Coefficient n of U_{p^s}(a*b): sum of a_i b_{p^s n - i}, for n < t.
template <class R>
Series<R> u_power_of_product(const R& ring, const Series<R>& a, const Series<R>& b, u64 ps, std::size_t t) {
  if ((t - 1) * ps >= std::min(a.size(), b.size())) throw std::invalid_argument("u_power_of_product: inputs too short");
  Series<R> out(t);
  for (std::size_t n = 0; n < t; ++n) {
    auto acc = ring.acc_zero();
    std::size_t e = n * ps;
    for (std::size_t i = 0; i <= e; ++i) ring.fma(acc, a[i], b[e - i]);
    out[n] = ring.reduce(acc);
  }
  return out;
}

template <class R>
Series<R> truncate(const Series<R>& a, std::size_t t) {
  return Series<R>(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(std::min(t, a.size())));
}

template <class To, class From>
Series<To> series_convert(const To& to, const From& from, const Series<From>& a) {
  Series<To> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = convert(to, from, a[i]);
  return out;
}

}  // namespace katz
