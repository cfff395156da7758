#pragma once

#include "katz/padic/matrix.hpp"
#include "katz/padic/poly.hpp"

#include <vector>

namespace katz {

/// det(xI - A) by Berkowitz' division-free algorithm, O(n^4). Low degree first.
template <class R>
Poly<R> charpoly_berkowitz(const R& ring, const Matrix<R>& a) {
  const std::size_t n = a.rows;
  if (a.cols != n) throw std::invalid_argument("charpoly: matrix not square");
  // c holds the coefficients of the leading r x r block, highest degree first
  std::vector<typename R::value_type> c{ring.one()};
  for (std::size_t r = 0; r < n; ++r) {
    // q = [1, -a_rr, -R S, -R M S, ..., -R M^{r-1} S]
    std::vector<typename R::value_type> q(r + 2, ring.zero());
    q[0] = ring.one();
    q[1] = ring.neg(a(r, r));
    std::vector<typename R::value_type> v(r);
    for (std::size_t i = 0; i < r; ++i) v[i] = a(i, r);  // S
    for (std::size_t k = 0; k < r; ++k) {
      auto acc = ring.acc_zero();
      for (std::size_t i = 0; i < r; ++i) ring.fma(acc, a(r, i), v[i]);
      q[k + 2] = ring.neg(ring.reduce(acc));
      if (k + 1 == r) break;
      std::vector<typename R::value_type> w(r);
      for (std::size_t i = 0; i < r; ++i) {
        auto ai = ring.acc_zero();
        for (std::size_t j = 0; j < r; ++j) ring.fma(ai, a(i, j), v[j]);
        w[i] = ring.reduce(ai);
      }
      v.swap(w);
    }
    std::vector<typename R::value_type> nc(r + 2, ring.zero());
    for (std::size_t i = 0; i < r + 2; ++i) {
      auto acc = ring.acc_zero();
      for (std::size_t j = 0; j <= std::min(i, r); ++j) ring.fma(acc, q[i - j], c[j]);
      nc[i] = ring.reduce(acc);
    }
    c.swap(nc);
  }
  return Poly<R>(c.rbegin(), c.rend());
}

/// In-place similarity reduction to upper Hessenberg form. Pivots are chosen
/// of minimal valuation, so every multiplier is exact and no precision is lost.
template <class R>
void hessenberg_reduce(const R& ring, Matrix<R>& a) {
  const std::size_t n = a.rows;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    int best = ring.digits();
    std::size_t piv = n;
    for (std::size_t i = k + 1; i < n; ++i) {
      int v = ring.valuation(a(i, k));
      if (v < best) { best = v; piv = i; if (v == 0) break; }
    }
    if (piv == n) continue;
    const std::size_t h = k + 1;
    if (piv != h) {
      std::swap_ranges(a.row(h), a.row(h) + n, a.row(piv));
      for (std::size_t i = 0; i < n; ++i) std::swap(a(i, h), a(i, piv));
    }
    auto uinv = ring.inverse(ring.exact_div_p(a(h, k), best));
    for (std::size_t r = h + 1; r < n; ++r) {
      if (ring.is_zero(a(r, k))) continue;
      auto c = ring.mul(ring.exact_div_p(a(r, k), best), uinv);
      // row_r -= c row_h, then col_h += c col_r
      auto* rr = a.row(r);
      const auto* rh = a.row(h);
      for (std::size_t j = k; j < n; ++j) rr[j] = ring.sub(rr[j], ring.mul(c, rh[j]));
      for (std::size_t i = 0; i < n; ++i) a(i, h) = ring.add(a(i, h), ring.mul(c, a(i, r)));
    }
  }
}

/// det(xI - H) for upper Hessenberg H, O(n^3). Low degree first.
template <class R>
Poly<R> charpoly_hessenberg(const R& ring, const Matrix<R>& h) {
  const std::size_t n = h.rows;
  std::vector<Poly<R>> p(n + 1);
  p[0] = {ring.one()};
  std::vector<typename R::Acc> acc;
  for (std::size_t k = 1; k <= n; ++k) {
    // acc_j = h(j,j-1) acc_{j-1} + h(j,k) p_{j-1} for j < k (1-based), so that
    // the correction term is h(k,k-1) acc_{k-1}
    std::vector<typename R::value_type> s(k, ring.zero());
    acc.resize(k);
    for (std::size_t j = 1; j < k; ++j) {
      std::fill(acc.begin(), acc.begin() + static_cast<std::ptrdiff_t>(j), ring.acc_zero());
      if (j >= 2) {
        const auto& sub = h(j - 1, j - 2);
        for (std::size_t d = 0; d + 1 < j; ++d) ring.fma(acc[d], sub, s[d]);
      }
      const auto& hjk = h(j - 1, k - 1);
      for (std::size_t d = 0; d < p[j - 1].size(); ++d) ring.fma(acc[d], hjk, p[j - 1][d]);
      for (std::size_t d = 0; d < j; ++d) s[d] = ring.reduce(acc[d]);
    }
    // p_k = (x - h_kk) p_{k-1} - h(k,k-1) s
    Poly<R> pk(k + 1, ring.zero());
    const auto& prev = p[k - 1];
    for (std::size_t d = 0; d < prev.size(); ++d) {
      pk[d + 1] = ring.add(pk[d + 1], prev[d]);
      pk[d] = ring.sub(pk[d], ring.mul(h(k - 1, k - 1), prev[d]));
    }
    if (k >= 2) {
      const auto& sub = h(k - 1, k - 2);
      for (std::size_t d = 0; d + 1 < k; ++d) pk[d] = ring.sub(pk[d], ring.mul(sub, s[d]));
    }
    p[k] = std::move(pk);
  }
  return p[n];
}

/// det(xI - A) via exact Hessenberg reduction.
template <class R>
Poly<R> charpoly(const R& ring, Matrix<R> a) {
  hessenberg_reduce(ring, a);
  return charpoly_hessenberg(ring, a);
}

/// Coefficients c_0..c_n of det(1 - tA), from det(xI - A).
template <class R>
std::vector<typename R::value_type> char_series_from_charpoly(const R& ring, const Poly<R>& chi, std::size_t n) {
  std::vector<typename R::value_type> c(n + 1, ring.zero());
  for (std::size_t s = 0; s <= n; ++s)
    if (n - s < chi.size()) c[s] = chi[n - s];
  return c;
}

/// c_0..c_n of det(1 - tA) over R.
template <class R>
std::vector<typename R::value_type> char_series(const R& ring, const Matrix<R>& a) {
  return char_series_from_charpoly(ring, charpoly(ring, a), a.rows);
}

}  // namespace katz
