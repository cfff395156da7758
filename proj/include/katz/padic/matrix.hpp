#pragma once

#include "katz/padic/ring.hpp"

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace katz {

/// Dense row-major matrix over a residue ring R.
template <class R>
struct Matrix {
  using T = typename R::value_type;
  std::size_t rows = 0, cols = 0;
  std::vector<T> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, const T& fill) : rows(r), cols(c), a(r * c, fill) {}

  T& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
  T* row(std::size_t i) { return a.data() + i * cols; }
  const T* row(std::size_t i) const { return a.data() + i * cols; }
};

template <class R>
Matrix<R> zero_matrix(const R& ring, std::size_t r, std::size_t c) {
  return Matrix<R>(r, c, ring.zero());
}

template <class R>
Matrix<R> identity(const R& ring, std::size_t n) {
  auto m = zero_matrix(ring, n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = ring.one();
  return m;
}

template <class R>
Matrix<R> mat_mul(const R& ring, const Matrix<R>& x, const Matrix<R>& y) {
  if (x.cols != y.rows) throw std::invalid_argument("mat_mul: shape mismatch");
  auto out = zero_matrix(ring, x.rows, y.cols);
  std::vector<typename R::Acc> acc(y.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    std::fill(acc.begin(), acc.end(), ring.acc_zero());
    for (std::size_t k = 0; k < x.cols; ++k) {
      const auto& xik = x(i, k);
      if (ring.is_zero(xik)) continue;
      const auto* yr = y.row(k);
      for (std::size_t j = 0; j < y.cols; ++j) ring.fma(acc[j], xik, yr[j]);
    }
    for (std::size_t j = 0; j < y.cols; ++j) out(i, j) = ring.reduce(acc[j]);
  }
  return out;
}

template <class R>
std::vector<typename R::value_type> mat_vec(const R& ring, const Matrix<R>& x,
                                            const std::vector<typename R::value_type>& v) {
  if (x.cols != v.size()) throw std::invalid_argument("mat_vec: shape mismatch");
  std::vector<typename R::value_type> out(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto acc = ring.acc_zero();
    const auto* xr = x.row(i);
    for (std::size_t j = 0; j < x.cols; ++j) ring.fma(acc, xr[j], v[j]);
    out[i] = ring.reduce(acc);
  }
  return out;
}

template <class R>
Matrix<R> mat_add(const R& ring, const Matrix<R>& x, const Matrix<R>& y) {
  Matrix<R> out = x;
  for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] = ring.add(x.a[i], y.a[i]);
  return out;
}

template <class R>
bool mat_equal(const R& ring, const Matrix<R>& x, const Matrix<R>& y) {
  if (x.rows != y.rows || x.cols != y.cols) return false;
  for (std::size_t i = 0; i < x.a.size(); ++i)
    if (!ring.equal(x.a[i], y.a[i])) return false;
  return true;
}

/// Inverse of a matrix whose determinant is a unit. Throws otherwise.
template <class R>
Matrix<R> mat_inverse(const R& ring, Matrix<R> m) {
  const std::size_t n = m.rows;
  if (m.cols != n) throw std::invalid_argument("mat_inverse: not square");
  auto inv = identity(ring, n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = n;
    for (std::size_t r = c; r < n; ++r)
      if (ring.valuation(m(r, c)) == 0) { piv = r; break; }
    if (piv == n) throw std::domain_error("mat_inverse: determinant is not a unit");
    if (piv != c) {
      std::swap_ranges(m.row(c), m.row(c) + n, m.row(piv));
      std::swap_ranges(inv.row(c), inv.row(c) + n, inv.row(piv));
    }
    auto s = ring.inverse(m(c, c));
    for (std::size_t j = 0; j < n; ++j) {
      m(c, j) = ring.mul(m(c, j), s);
      inv(c, j) = ring.mul(inv(c, j), s);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || ring.is_zero(m(r, c))) continue;
      auto f = m(r, c);
      for (std::size_t j = 0; j < n; ++j) {
        m(r, j) = ring.sub(m(r, j), ring.mul(f, m(c, j)));
        inv(r, j) = ring.sub(inv(r, j), ring.mul(f, inv(c, j)));
      }
    }
  }
  return inv;
}

/// Valuations of the elementary divisors (Smith form) of m over Z/p^k,
/// ascending. Zero divisors are reported as k.
template <class R>
std::vector<int> elementary_divisor_valuations(const R& ring, Matrix<R> m) {
  const std::size_t nr = m.rows, nc = m.cols;
  std::vector<int> out;
  std::vector<std::size_t> rowp(nr), colp(nc);
  for (std::size_t i = 0; i < nr; ++i) rowp[i] = i;
  for (std::size_t j = 0; j < nc; ++j) colp[j] = j;
  std::size_t steps = std::min(nr, nc);
  for (std::size_t s = 0; s < steps; ++s) {
    int best = ring.digits();
    std::size_t bi = s, bj = s;
    for (std::size_t i = s; i < nr && best > 0; ++i)
      for (std::size_t j = s; j < nc; ++j) {
        int v = ring.valuation(m(rowp[i], colp[j]));
        if (v < best) { best = v; bi = i; bj = j; if (v == 0) break; }
      }
    if (best >= ring.digits()) {
      for (std::size_t t = s; t < steps; ++t) out.push_back(ring.digits());
      break;
    }
    out.push_back(best);
    std::swap(rowp[s], rowp[bi]);
    std::swap(colp[s], colp[bj]);
    const std::size_t pr = rowp[s], pc = colp[s];
    auto u = ring.inverse(ring.exact_div_p(m(pr, pc), best));
    // clear the pivot column below; the pivot divides everything in the trailing block
    for (std::size_t i = s + 1; i < nr; ++i) {
      std::size_t r = rowp[i];
      if (ring.is_zero(m(r, pc))) continue;
      auto c = ring.mul(ring.exact_div_p(m(r, pc), best), u);
      for (std::size_t j = s; j < nc; ++j) {
        std::size_t cc = colp[j];
        m(r, cc) = ring.sub(m(r, cc), ring.mul(c, m(pr, cc)));
      }
    }
    // column clearing does not affect the trailing block's divisors beyond the pivot row
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Rank of the reduction mod p.
template <class R>
std::size_t rank_mod_p(const R& ring, const Matrix<R>& m) {
  std::size_t r = 0;
  for (int v : elementary_divisor_valuations(ring, m))
    if (v == 0) ++r;
  return r;
}

}  // namespace katz
