#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace katz {

inline std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n) {
  std::vector<std::pair<std::int64_t, int>> f;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    int e = 0;
    while (n % d == 0) { n /= d; ++e; }
    if (e) f.emplace_back(d, e);
  }
  if (n > 1) f.emplace_back(n, 1);
  return f;
}

inline std::int64_t euler_phi(std::int64_t n) {
  std::int64_t r = n;
  for (auto [q, e] : factorize(n)) r = r / q * (q - 1);
  return r;
}

/// Index of Gamma_0(N) in SL_2(Z).
inline std::int64_t gamma0_index(std::int64_t n) {
  std::int64_t r = n;
  for (auto [q, e] : factorize(n)) r = r / q * (q + 1);
  return r;
}

namespace detail {

// Kronecker-style symbol (d / q) for odd prime q, d in {-1, -3}
inline int legendre(std::int64_t d, std::int64_t q) {
  std::int64_t a = ((d % q) + q) % q;
  if (a == 0) return 0;
  std::int64_t r = 1, b = a, e = (q - 1) / 2;
  while (e) {
    if (e & 1) r = r * b % q;
    b = b * b % q;
    e >>= 1;
  }
  return r == 1 ? 1 : -1;
}

}  // namespace detail

struct Gamma0Invariants {
  std::int64_t index = 1, nu2 = 0, nu3 = 0, cusps = 0, genus = 0;
};

inline Gamma0Invariants gamma0_invariants(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("level must be positive");
  Gamma0Invariants g;
  g.index = gamma0_index(n);
  auto f = factorize(n);
  g.nu2 = (n % 4 == 0) ? 0 : 1;
  g.nu3 = (n % 9 == 0) ? 0 : 1;
  for (auto [q, e] : f) {
    if (g.nu2) g.nu2 *= (q == 2) ? 1 : 1 + detail::legendre(-1, q);
    if (g.nu3) g.nu3 *= (q == 3) ? 1 : 1 + (q == 2 ? -1 : detail::legendre(-3, q));
  }
  for (std::int64_t d = 1; d <= n; ++d)
    if (n % d == 0) g.cusps += euler_phi(std::gcd(d, n / d));
  // 12 g = 12 + index - 3 nu2 - 4 nu3 - 6 cusps
  g.genus = (12 + g.index - 3 * g.nu2 - 4 * g.nu3 - 6 * g.cusps) / 12;
  return g;
}

/// dim M_k(Gamma_0(N)).
inline std::int64_t dimension(std::int64_t n, std::int64_t k) {
  if (k == 1) throw std::invalid_argument("weight 1 is not supported");
  if (k < 0 || k % 2 != 0) return 0;
  if (k == 0) return 1;
  auto g = gamma0_invariants(n);
  if (k == 2) return g.genus + g.cusps - 1;
  return (k - 1) * (g.genus - 1) + (k / 4) * g.nu2 + (k / 3) * g.nu3 + (k / 2) * g.cusps;
}

/// dim S_k(Gamma_0(N)).
inline std::int64_t cusp_dimension(std::int64_t n, std::int64_t k) {
  if (k == 1) throw std::invalid_argument("weight 1 is not supported");
  if (k <= 0 || k % 2 != 0) return 0;
  auto g = gamma0_invariants(n);
  if (k == 2) return g.genus;
  return dimension(n, k) - g.cusps;
}

/// Sturm bound: a form of weight k vanishing to this order (mod p) vanishes.
inline std::int64_t sturm_bound(std::int64_t n, std::int64_t k) {
  return k * gamma0_index(n) / 12 + 1;
}

}  // namespace katz
