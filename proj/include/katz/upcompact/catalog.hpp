#pragma once

#include "katz/modspaces/spaces.hpp"
#include "katz/padic/matrix.hpp"
#include "katz/padic/rational.hpp"
#include "katz/qexp/eisenstein.hpp"
#include "katz/qexp/series.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace katz {

/// Thrown when p U_p of a catalog row leaves the span of the catalog.
class CatalogIncomplete : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Smallest I with n(p-1)I/(p+1) - 1 - (n-1)/(p+1) > m + safety.
inline int block_count(u64 p, int n, int m, int safety = 1) {
  if (m < 1) throw std::invalid_argument("block_count: m must be positive");
  // multiply through by p+1
  const std::int64_t q = static_cast<std::int64_t>(p) + 1;
  const std::int64_t rhs = (m + safety) * q + q + (n - 1);
  std::int64_t step = static_cast<std::int64_t>(n) * (static_cast<std::int64_t>(p) - 1);
  return static_cast<int>(rhs / step + 1);
}

/// Splits an even weight as k0 + j w with 0 < k0 <= w, w = n(p-1).
///
/// The base weight avoids 0: for p = 2 the comparison with the Hasse lattice
/// would run through weight 1, and the floors below fail there in practice.
struct WeightSplit {
  int k0 = 0;
  int j = 0;
};

inline WeightSplit split_weight(int k, const EisensteinConfig& cfg) {
  if (k == 1) throw std::invalid_argument("weight 1 is not supported");
  if (k % 2) throw std::invalid_argument("odd weight " + std::to_string(k) + ": the space is zero");
  const int w = cfg.weight;
  int k0 = ((k % w) + w) % w;
  if (k0 == 0) k0 = w;
  return {k0, (k - k0) / w};
}

/// Floor for v_p of the entry (row in block w, column in block u) of p U_p
/// in the catalog basis: max(1, ceil((npw - nu - n + 1)/(p+1))).
inline int entry_floor(u64 p, int n, int w, int u) {
  std::int64_t num = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(p) * w - static_cast<std::int64_t>(n) * u - n + 1;
  std::int64_t den = static_cast<std::int64_t>(p) + 1;
  std::int64_t c = num >= 0 ? (num + den - 1) / den : -((-num) / den);
  return static_cast<int>(std::max<std::int64_t>(1, c));
}

/// Diagonal rescaling exponent of block w (integer part of the r-limit weight).
inline int block_shift(u64 p, int n, int w) { return static_cast<int>(static_cast<std::int64_t>(n) * w / (static_cast<std::int64_t>(p) + 1)); }

/// Rows t_{i,j} = a_{i,j} E^{-i} of the Katz expansion, blocks 0..I.
template <class R>
struct KatzCatalog {
  R ring;
  EisensteinConfig cfg;
  int level = 1;
  int k0 = 0;
  int blocks = 0;               ///< I
  std::size_t q_precision = 0;  ///< T: coordinates are read on q^0..q^{T-1}
  std::vector<Series<R>> rows;  ///< at length p T
  std::vector<std::size_t> pivots;
  std::vector<int> block_of_row;
  std::map<std::size_t, std::size_t> pivot_row;
  std::map<std::string, std::string> provenance;

  std::size_t dim() const { return rows.size(); }
  std::size_t source_length() const { return rows.empty() ? 0 : rows[0].size(); }
  int top_weight() const { return k0 + blocks * cfg.weight; }
  std::vector<int> block_dims() const {
    std::vector<int> d(static_cast<std::size_t>(blocks) + 1, 0);
    for (int b : block_of_row) ++d[static_cast<std::size_t>(b)];
    return d;
  }
};

/// Builds the catalog; T = largest pivot + margin unless t_override is set.
template <class R>
KatzCatalog<R> build_catalog(SpaceBuilder<R>& sb, int k0, int blocks, std::size_t t_margin = 16,
                             std::size_t t_extra = 0) {
  const R& ring = sb.ring();
  const auto& cfg = sb.config();
  const u64 p = ring.p();
  if (k0 + blocks * cfg.weight > sb.max_weight()) throw std::invalid_argument("build_catalog: builder weight too small");
  KatzCatalog<R> c{ring, cfg};
  c.level = sb.level();
  c.k0 = k0;
  c.blocks = blocks;
  auto top = sb.pivots(c.top_weight());
  std::size_t maxpiv = top.empty() ? 0 : top.back();
  c.q_precision = maxpiv + t_margin + t_extra;
  const std::size_t len = static_cast<std::size_t>(p) * c.q_precision;
  c.provenance = sb.provenance();

  Series<R> einv = series_inverse(ring, e_series(ring, cfg, len));
  Series<R> epow = series_one(ring, len);
  for (int i = 0; i <= blocks; ++i) {
    const int k = k0 + i * cfg.weight;
    // block 0 is all of M_{k0}; later blocks are the complements W(k)
    auto members = i == 0 ? sb.space(k, len) : sb.complement(k, len);
    auto piv = i == 0 ? sb.pivots(k) : sb.new_pivots(k);
    if (i > 0) epow = series_mul(ring, epow, einv);
    // members come ordered by their mod-p pivot
    for (std::size_t t = 0; t < members.size(); ++t) {
      auto row = i == 0 ? std::move(members[t]) : series_mul(ring, members[t], epow);
      c.rows.push_back(std::move(row));
      c.block_of_row.push_back(i);
    }
    for (auto pv : piv) c.pivots.push_back(pv);
  }
  for (std::size_t r = 0; r < c.pivots.size(); ++r) c.pivot_row[c.pivots[r]] = r;
  if (c.pivot_row.size() != c.pivots.size()) throw std::logic_error("build_catalog: repeated pivot");
  return c;
}

/// The matrix of p U_p o G^j on the catalog and its bookkeeping.
template <class R>
struct CompactMatrix {
  Matrix<R> a;  ///< entry (w, u): coefficient of row w in p U_p(G^j t_u)
  int j = 0;
  int weight = 0;
  std::vector<int> row_floor_violations;  ///< per row, count of entries below the floor
  std::size_t floor_violations() const {
    std::size_t s = 0;
    for (int v : row_floor_violations) s += static_cast<std::size_t>(v);
    return s;
  }
};

/// G^j at length t (j may be negative).
template <class R>
Series<R> g_power(const R& ring, const EisensteinConfig& cfg, int j, std::size_t t) {
  auto g = g_series(ring, cfg, t);
  return series_pow(ring, g, j, t);
}

/// S^{-1} for S(i, w) = t_w at pivot i: coordinates of a series are S^{-1} y.
template <class R>
Matrix<R> pivot_inverse(const KatzCatalog<R>& cat) {
  const std::size_t d = cat.dim();
  Matrix<R> s = zero_matrix(cat.ring, d, d);
  for (std::size_t w = 0; w < d; ++w)
    for (std::size_t i = 0; i < d; ++i) s(i, w) = cat.rows[w][cat.pivots[i]];
  return mat_inverse(cat.ring, s);
}

/// Catalog coordinates of a series read at the pivots.
template <class R>
std::vector<typename R::value_type> catalog_coordinates(const KatzCatalog<R>& cat, const Matrix<R>& sinv,
                                                        const Series<R>& f) {
  const R& ring = cat.ring;
  const std::size_t d = cat.dim();
  std::vector<typename R::Acc> acc(d, ring.acc_zero());
  for (std::size_t i = 0; i < d; ++i) {
    const auto& y = f[cat.pivots[i]];
    if (ring.is_zero(y)) continue;
    for (std::size_t w = 0; w < d; ++w) ring.fma(acc[w], sinv(w, i), y);
  }
  std::vector<typename R::value_type> x(d);
  for (std::size_t w = 0; w < d; ++w) x[w] = ring.reduce(acc[w]);
  return x;
}

/// f - sum x_w t_w on q^0..q^{t-1}.
template <class R>
Series<R> catalog_residual(const KatzCatalog<R>& cat, const std::vector<typename R::value_type>& x, const Series<R>& f,
                           std::size_t t) {
  const R& ring = cat.ring;
  Series<R> res(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(t));
  for (std::size_t w = 0; w < cat.dim(); ++w) {
    if (ring.is_zero(x[w])) continue;
    const auto& row = cat.rows[w];
    for (std::size_t q = 0; q < t; ++q) res[q] = ring.sub(res[q], ring.mul(x[w], row[q]));
  }
  return res;
}

/// Computes p U_p(G^j t_u) for every catalog row and its coordinates in the
/// catalog. Coordinates are read at the pivots; the rest of the first T
/// coefficients must agree up to the truncation floor.
template <class R>
CompactMatrix<R> up_matrix(const KatzCatalog<R>& cat, int j) {
  const R& ring = cat.ring;
  const u64 p = ring.p();
  const int n = cat.cfg.n;
  const std::size_t d = cat.dim(), t = cat.q_precision, len = cat.source_length();
  if (len < static_cast<std::size_t>(p) * t) throw std::invalid_argument("up_matrix: source precision below p T");
  CompactMatrix<R> out;
  out.j = j;
  out.weight = cat.k0 + j * cat.cfg.weight;
  out.a = zero_matrix(ring, d, d);
  out.row_floor_violations.assign(d, 0);
  if (d == 0) return out;

  Matrix<R> sinv = pivot_inverse(cat);
  Series<R> gj = g_power(ring, cat.cfg, j, len);
  const auto pp = ring.from_int(static_cast<long long>(p));

  for (std::size_t u = 0; u < d; ++u) {
    auto img = u_power_of_product(ring, cat.rows[u], gj, p, t);
    for (auto& x : img) x = ring.mul(x, pp);
    auto x = catalog_coordinates(cat, sinv, img);
    for (std::size_t w = 0; w < d; ++w) out.a(w, u) = x[w];
    // residual: what lies beyond block I must have valuation >= the block I+1 floor
    auto res = catalog_residual(cat, x, img, t);
    const int ub = cat.block_of_row[u];
    const int need = std::min(ring.digits(), entry_floor(p, n, cat.blocks + 1, ub));
    for (std::size_t q = 0; q < t; ++q)
      if (ring.valuation(res[q]) < need)
        throw CatalogIncomplete("p U_p(G^" + std::to_string(j) + " t_" + std::to_string(u) + ") leaves the catalog span at q^" +
                                std::to_string(q) + " (increase the number of blocks or the q-precision)");
    for (std::size_t w = 0; w < d; ++w) {
      int fl = std::min(ring.digits(), entry_floor(p, n, cat.block_of_row[w], ub));
      if (ring.valuation(out.a(w, u)) < fl) ++out.row_floor_violations[w];
    }
  }
  return out;
}

/// Lower bound for v_p(c_s) of the unscaled characteristic series: the sum of
/// the s smallest row floors w n(p-1)/(p+1) - 1 - (n-1)/(p+1). Independent of j.
inline Rational coefficient_floor(u64 p, int n, const std::vector<int>& block_dims, std::int64_t s) {
  Rational total(0);
  const Rational q(static_cast<std::int64_t>(p) + 1);
  std::int64_t left = s;
  for (std::size_t w = 0; left > 0; ++w) {
    // blocks beyond the catalog continue the pattern with the last block's size
    std::int64_t dw = w < block_dims.size() ? block_dims[w] : (block_dims.empty() ? 1 : std::max(1, block_dims.back()));
    std::int64_t take = std::min(left, dw);
    Rational per = Rational(static_cast<std::int64_t>(w) * n * (static_cast<std::int64_t>(p) - 1)) / q - Rational(1) -
                   Rational(n - 1) / q;
    total += per * Rational(take);
    left -= take;
  }
  return total;
}

template <class R>
Rational coefficient_floor(const KatzCatalog<R>& cat, std::int64_t s) {
  return coefficient_floor(cat.ring.p(), cat.cfg.n, cat.block_dims(), s);
}

}  // namespace katz
