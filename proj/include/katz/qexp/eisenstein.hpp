#pragma once

#include "katz/padic/ring.hpp"
#include "katz/qexp/series.hpp"

#include <gmpxx.h>

#include <stdexcept>
#include <vector>

namespace katz {

/// The lift E of the Hasse invariant used for prime p, with exponent n.
struct EisensteinConfig {
  u64 p = 2;
  int weight = 4;  ///< n(p-1)
  int n = 4;

  static EisensteinConfig for_prime(u64 p) {
    if (!is_prime(p)) throw std::invalid_argument("EisensteinConfig: p must be prime");
    if (p == 2) return {2, 4, 4};
    if (p == 3) return {3, 6, 3};
    return {p, static_cast<int>(p - 1), 1};
  }
};

/// Bernoulli numbers B_0..B_k (B_1 = -1/2).
inline std::vector<mpq_class> bernoulli_numbers(int k) {
  std::vector<mpq_class> b(static_cast<std::size_t>(k) + 1);
  b[0] = 1;
  for (int m = 1; m <= k; ++m) {
    mpq_class s = 0;
    mpz_class binom = 1;  // C(m+1, j)
    for (int j = 0; j < m; ++j) {
      s += binom * b[static_cast<std::size_t>(j)];
      binom = binom * (m + 1 - j) / (j + 1);
    }
    b[static_cast<std::size_t>(m)] = -s / (m + 1);
    b[static_cast<std::size_t>(m)].canonicalize();
  }
  return b;
}

/// -2k/B_k as an exact rational.
inline mpq_class eisenstein_constant(int k) {
  auto b = bernoulli_numbers(k);
  mpq_class c = mpq_class(-2 * k) / b[static_cast<std::size_t>(k)];
  c.canonicalize();
  return c;
}

template <class R>
typename R::value_type rational_to_ring(const R& ring, const mpq_class& q) {
  mpz_class den = q.get_den();
  if (den % static_cast<unsigned long>(ring.p()) == 0) throw std::domain_error("rational is not p-integral");
  return ring.mul(ring.from_mpz(q.get_num()), ring.inverse(ring.from_mpz(den)));
}

/// Normalised level-one Eisenstein series E_k, k even >= 4.
template <class R>
Series<R> eisenstein(const R& ring, int k, std::size_t t) {
  if (k < 4 || k % 2 != 0) throw std::invalid_argument("eisenstein: weight must be even and >= 4");
  auto c = rational_to_ring(ring, eisenstein_constant(k));
  Series<R> sigma = series_zero(ring, t);
  for (std::size_t d = 1; d < t; ++d) {
    auto dk = ring.one();
    auto dd = ring.from_int(static_cast<long long>(d));
    for (int i = 0; i < k - 1; ++i) dk = ring.mul(dk, dd);
    for (std::size_t m = d; m < t; m += d) sigma[m] = ring.add(sigma[m], dk);
  }
  Series<R> e = series_scale(ring, sigma, c);
  if (t) e[0] = ring.one();
  return e;
}

/// Delta = q prod (1 - q^n)^24, from Jacobi's identity for prod (1 - q^n)^3.
template <class R>
Series<R> delta(const R& ring, std::size_t t) {
  auto j3 = series_zero(ring, t);
  for (long long k = 0;; ++k) {
    std::size_t e = static_cast<std::size_t>(k * (k + 1) / 2);
    if (e >= t) break;
    j3[e] = ring.from_int((k % 2 ? -1 : 1) * (2 * k + 1));
  }
  auto j6 = series_mul(ring, j3, j3);
  auto j12 = series_mul(ring, j6, j6);
  auto j24 = series_mul(ring, j12, j12);
  auto out = series_zero(ring, t);
  for (std::size_t i = 0; i + 1 < t; ++i) out[i + 1] = j24[i];
  return out;
}

template <class R>
Series<R> e_series(const R& ring, const EisensteinConfig& cfg, std::size_t t) {
  return eisenstein(ring, cfg.weight, t);
}

/// G = E / V_p E.
template <class R>
Series<R> g_series(const R& ring, const EisensteinConfig& cfg, std::size_t t) {
  auto e = e_series(ring, cfg, t);
  return series_mul(ring, e, series_inverse(ring, v_operator(ring, e, cfg.p)));
}

}  // namespace katz
