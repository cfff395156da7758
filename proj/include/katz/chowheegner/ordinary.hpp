#pragma once

#include "katz/padic/charpoly.hpp"
#include "katz/padic/matrix.hpp"
#include "katz/padic/poly.hpp"

#include <random>
#include <stdexcept>
#include <vector>

namespace katz {

/// Unit-root part of a matrix U with integral entries: chi(U) = low * high
/// with low carrying the unit roots, and the projector Pi = B(U).
template <class R>
struct OrdinaryProjector {
  R ring;
  Matrix<R> u;
  Poly<R> chi, low, high, b;
  std::size_t rank = 0;

  std::vector<typename R::value_type> apply(const std::vector<typename R::value_type>& v) const {
    return poly_apply(ring, b, u, v);
  }
  Matrix<R> matrix() const { return poly_matrix(ring, b, u); }
};

/// The cut separates slope 0 from every positive slope (all are >= 1/dim).
template <class R>
OrdinaryProjector<R> ordinary_projector(const R& ring, const Matrix<R>& u) {
  OrdinaryProjector<R> op{ring, u};
  auto h = u;
  hessenberg_reduce(ring, h);
  op.chi = charpoly_hessenberg(ring, h);
  const Rational cut(1, 2 * static_cast<std::int64_t>(u.rows) + 2);
  auto sp = hensel_split(ring, op.chi, cut);
  op.low = sp.first;
  op.high = sp.second;
  op.rank = op.low.size() - 1;
  op.b = crt_projector(ring, op.low, op.high, op.chi);
  if (op.rank == 0) op.b.clear();
  return op;
}

/// A basis of the ordinary submodule: columns of high(U) X for random X,
/// chosen independent mod p. The submodule is saturated, so r such columns span it.
template <class R>
std::vector<std::vector<typename R::value_type>> ordinary_basis(const OrdinaryProjector<R>& op, unsigned seed = 1) {
  const R& ring = op.ring;
  const std::size_t d = op.u.rows, r = op.rank;
  std::vector<std::vector<typename R::value_type>> out;
  if (r == 0) return out;
  std::mt19937_64 gen(seed);
  Mod64 fp(ring.p(), 1);
  std::vector<std::vector<u64>> echelon;  // mod-p reduced copies with their pivot
  std::vector<std::size_t> piv;
  for (int round = 0; round < 8 && out.size() < r; ++round) {
    const std::size_t k = r + 4;
    auto x = zero_matrix(ring, d, k);
    for (auto& e : x.a) e = ring.from_int(static_cast<long long>(gen() % 1000003));
    // Horner: y = high(U) x
    auto y = zero_matrix(ring, d, k);
    for (std::size_t i = op.high.size(); i-- > 0;) {
      y = mat_mul(ring, op.u, y);
      for (std::size_t t = 0; t < d * k; ++t) y.a[t] = ring.add(y.a[t], ring.mul(op.high[i], x.a[t]));
    }
    for (std::size_t c = 0; c < k && out.size() < r; ++c) {
      std::vector<u64> v(d);
      for (std::size_t i = 0; i < d; ++i) v[i] = fp.from_mpz(ring.to_mpz(y(i, c)));
      for (std::size_t e = 0; e < echelon.size(); ++e) {
        if (v[piv[e]] == 0) continue;
        const u64 f = fp.mul(v[piv[e]], fp.inverse(echelon[e][piv[e]]));
        for (std::size_t i = 0; i < d; ++i) v[i] = fp.sub(v[i], fp.mul(f, echelon[e][i]));
      }
      std::size_t pv = d;
      for (std::size_t i = 0; i < d; ++i)
        if (v[i] != 0) {
          pv = i;
          break;
        }
      if (pv == d) continue;
      echelon.push_back(v);
      piv.push_back(pv);
      std::vector<typename R::value_type> col(d);
      for (std::size_t i = 0; i < d; ++i) col[i] = y(i, c);
      out.push_back(std::move(col));
    }
  }
  if (out.size() < r) throw std::runtime_error("ordinary_basis: could not reach the ordinary rank");
  return out;
}

}  // namespace katz
