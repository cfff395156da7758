#pragma once

#include "katz/chowheegner/curve.hpp"
#include "katz/chowheegner/ordinary.hpp"
#include "katz/modspaces/fixtures.hpp"
#include "katz/padic/recognize.hpp"
#include "katz/upcompact/catalog.hpp"
#include "katz/upcompact/char_series.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace katz {

struct LValueOptions {
  int buffer = 8;          ///< digits carried beyond m
  int extra_blocks = 0;
  std::size_t t_margin = 16;
  int min_pre_iterations = 0;
  int max_pre_iterations = 12;
  u64 max_separation_prime = 200;
};

struct LValueResult {
  u64 p = 0;
  int m = 0;
  int tame_level = 1;
  int blocks = 0;
  std::size_t q_precision = 0, dim = 0, ordinary_rank = 0;
  int mu = 0;
  int pre_iterations = 0;                ///< t with U_p^t(H) in the catalog
  int fit_valuation = 0;                 ///< residual valuation of U_p^t(H) against the catalog
  std::vector<u64> separation_primes;    ///< Hecke primes used besides U_p
  PadicNumber alpha;                     ///< U_p-eigenvalue of the stabilized g
  PadicNumber lambda;                    ///< coordinate of e_ord(H) along g_alpha
  std::string f_label, g_label;
  std::map<std::string, std::string> provenance;
};

namespace detail {

inline int tame_part(long n, u64 p) {
  while (n % static_cast<long>(p) == 0) n /= static_cast<long>(p);
  return static_cast<int>(n);
}

template <class R>
Series<R> newform_series(const R& ring, const Newform& f, std::size_t t) {
  if (f.coeffs.size() < t) throw std::invalid_argument("newform " + f.label + " has only " + std::to_string(f.coeffs.size()) + " coefficients, need " + std::to_string(t));
  Series<R> s(t);
  for (std::size_t i = 0; i < t; ++i) s[i] = ring.from_mpz(f.coeffs[i]);
  return s;
}

template <class R>
PadicNumber to_padic(const R& ring, const typename R::value_type& x, int prec) {
  return padic_from_int(ring.p(), ring.to_mpz(x), std::min(prec, ring.digits()));
}

/// Forms spanned by q-expansions, brought to reduced echelon form at
/// positions below `limit` and saturated (divided by the p-power of each
/// pivot), so coordinates are the values at the positions.
template <class R>
struct QSpan {
  R ring;
  std::vector<Series<R>> basis;
  std::vector<std::size_t> positions;
  int loss = 0;  ///< digits lost to saturation

  QSpan(const R& r, std::vector<Series<R>> b, std::size_t limit) : ring(r), basis(std::move(b)) {
    const std::size_t n = basis.size();
    for (std::size_t s = 0; s < n; ++s) {
      int best = ring.digits();
      std::size_t bj = n, bq = limit;
      for (std::size_t j = s; j < n; ++j)
        for (std::size_t q = 0; q < limit; ++q) {
          int v = ring.valuation(basis[j][q]);
          if (v < best) {
            best = v;
            bj = j;
            bq = q;
          }
        }
      if (bj == n) throw std::runtime_error("ordinary forms are dependent on the first " + std::to_string(limit) + " coefficients");
      std::swap(basis[s], basis[bj]);
      auto& row = basis[s];
      if (best > 0) {
        for (auto& c : row) {
          if (ring.valuation(c) < best) throw std::runtime_error("ordinary forms are not determined by their first " + std::to_string(limit) + " coefficients");
          c = ring.exact_div_p(c, best);
        }
        loss = std::max(loss, best);
      }
      const auto inv = ring.inverse(row[bq]);
      for (auto& c : row) c = ring.mul(c, inv);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == s || ring.is_zero(basis[j][bq])) continue;
        const auto f = basis[j][bq];
        for (std::size_t q = 0; q < row.size(); ++q) basis[j][q] = ring.sub(basis[j][q], ring.mul(f, row[q]));
      }
      positions.push_back(bq);
    }
  }

  std::vector<typename R::value_type> coords(const Series<R>& f) const {
    std::vector<typename R::value_type> y(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) y[i] = f[positions[i]];
    return y;
  }

  /// min v_p of f - sum c_j basis_j on the first t coefficients.
  int residual(const Series<R>& f, const std::vector<typename R::value_type>& c, std::size_t t) const {
    int v = ring.digits();
    for (std::size_t q = 0; q < t; ++q) {
      auto s = f[q];
      for (std::size_t j = 0; j < basis.size(); ++j) s = ring.sub(s, ring.mul(c[j], basis[j][q]));
      v = std::min(v, ring.valuation(s));
    }
    return v;
  }
};

/// w with w (M_i - e_i) = 0 for all i, by elimination on the stacked
/// transposes with exact precision tracking. Returns nullopt while the joint
/// eigenspace is still more than one-dimensional.
inline std::optional<std::vector<PadicNumber>> left_joint_eigenvector(std::vector<std::vector<std::vector<PadicNumber>>> rows,
                                                                      std::size_t r, int rank_threshold) {
  // rows: list of row vectors of length r (the stacked system C z = 0)
  std::vector<std::vector<PadicNumber>> c;
  for (auto& blk : rows)
    for (auto& row : blk) c.push_back(std::move(row));
  const std::size_t k = c.size();
  std::vector<std::size_t> colperm(r);
  std::iota(colperm.begin(), colperm.end(), 0);
  std::vector<std::size_t> pivot_col;
  std::size_t rank = 0;
  for (; rank + 1 < r; ++rank) {
    int best = 1 << 30;
    std::size_t bi = k, bj = r;
    for (std::size_t i = rank; i < k; ++i)
      for (std::size_t j = rank; j < r; ++j) {
        int v = c[i][colperm[j]].valuation();
        if (v < c[i][colperm[j]].absolute_precision() && v < best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    if (bi == k || best >= rank_threshold) break;
    std::swap(c[rank], c[bi]);
    std::swap(colperm[rank], colperm[bj]);
    const auto& piv = c[rank][colperm[rank]];
    for (std::size_t i = rank + 1; i < k; ++i) {
      if (c[i][colperm[rank]].is_zero()) continue;
      auto f = padic_div(c[i][colperm[rank]], piv);
      for (std::size_t j = rank; j < r; ++j) c[i][colperm[j]] = padic_sub(c[i][colperm[j]], padic_mul(f, c[rank][colperm[j]]));
    }
  }
  if (rank + 1 < r) return std::nullopt;
  // the remaining column must vanish
  for (std::size_t i = rank; i < k; ++i)
    if (c[i][colperm[r - 1]].valuation() < rank_threshold) throw std::domain_error("Hecke separation: no joint eigenvector (g not found in the ordinary subspace)");
  std::vector<PadicNumber> z(r);
  const u64 p = c.empty() ? 2 : c[0][0].p;
  z[colperm[r - 1]] = padic_from_int(p, 1, 1 << 12);
  for (std::size_t s = rank; s-- > 0;) {
    PadicNumber acc = padic_from_int(p, 0, 1 << 12);
    for (std::size_t j = s + 1; j < r; ++j) acc = padic_add(acc, padic_mul(c[s][colperm[j]], z[colperm[j]]));
    z[colperm[s]] = padic_neg(padic_div(acc, c[s][colperm[s]]));
  }
  return z;
}

inline PadicNumber dot(const std::vector<PadicNumber>& a, const std::vector<PadicNumber>& b) {
  PadicNumber s = padic_from_int(a.at(0).p, 0, 1 << 12);
  for (std::size_t i = 0; i < a.size(); ++i) s = padic_add(s, padic_mul(a[i], b[i]));
  return s;
}

}  // namespace detail

/// Coordinate along the stabilized g of e_ord(theta^{-1}(f^[p]) g) in weight 2
/// at tame level.
inline LValueResult lvalue(const Newform& f, const Newform& g, u64 p, int m, const std::filesystem::path& fixture_dir,
                           const LValueOptions& opt = {}) {
  if (!is_prime(p)) throw std::invalid_argument("p must be prime");
  if (m < 20) throw std::invalid_argument("lvalue: precision below 20 digits makes recognition unreliable");
  if (g.coeffs.size() < 2 || g.coeffs[1] != 1 || f.coeffs.size() < 2 || f.coeffs[1] != 1) throw std::invalid_argument("newforms must have a_1 = 1");
  LValueResult out;
  out.p = p;
  out.m = m;
  out.f_label = f.label;
  out.g_label = g.label;
  const long lcm = std::lcm(static_cast<long>(f.level), static_cast<long>(g.level));
  const int n0 = detail::tame_part(lcm, p);
  out.tame_level = n0;
  auto fx = FixtureSet::load(n0, fixture_dir);
  auto cfg = EisensteinConfig::for_prime(p);
  const int n = cfg.n;
  const int blocks = block_count(p, n, m) + opt.extra_blocks;
  const int mu = m + opt.buffer;
  const int digits = mu + block_shift(p, n, blocks) + 1;
  out.blocks = blocks;
  out.mu = mu;
  out.provenance = fx.digests();
  out.provenance[f.label] = f.digest;
  out.provenance[g.label] = g.digest;

  with_ring(p, digits, [&](const auto& ring) {
    using R = std::decay_t<decltype(ring)>;
    detail::PhaseTimer timer;
    SpaceBuilder<R> sb(ring, cfg, fx, 2 + blocks * cfg.weight);
    auto cat = build_catalog(sb, 2, blocks, opt.t_margin);
    auto cm = up_matrix(cat, 0);
    timer.mark("weight-2 catalog and U_p");
    const std::size_t d = cat.dim(), t = cat.q_precision, len = cat.source_length();
    out.dim = d;
    out.q_precision = t;
    std::vector<int> shift(d);
    for (std::size_t w = 0; w < d; ++w) shift[w] = block_shift(p, n, cat.block_of_row[w]);

    // U on the scaled lattice: (p U)(w,u) p^{c_u - c_w} / p, modulo p^{mu-1}
    R r2(p, mu - 1);
    auto u = zero_matrix(r2, d, d);
    for (std::size_t w = 0; w < d; ++w)
      for (std::size_t c = 0; c < d; ++c) {
        const int sh = shift[c] - shift[w] - 1;
        mpz_class x = ring.to_mpz(cm.a(w, c));
        if (x == 0) continue;
        if (sh >= 0) {
          x *= mpz_pow(p, sh);
        } else {
          if (ring.valuation(cm.a(w, c)) < -sh) throw std::logic_error("scaled U is not integral");
          mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), mpz_pow(p, -sh).get_mpz_t());
        }
        u(w, c) = r2.from_mpz(x);
      }
    auto op = ordinary_projector(r2, u);
    out.ordinary_rank = op.rank;
    if (op.rank == 0) throw std::domain_error("the ordinary subspace is zero");
    timer.mark("ordinary projector (rank " + std::to_string(op.rank) + ")");

    // H = theta^{-1}(f^[p]) g, pushed into the catalog by U_p^t
    Matrix<R> sinv = pivot_inverse(cat);
    std::vector<typename R::value_type> x;
    const std::size_t avail = std::min(f.coeffs.size(), g.coeffs.size());
    bool fitted = false;
    std::string why;
    for (int pre = opt.min_pre_iterations; pre <= opt.max_pre_iterations; ++pre) {
      u64 ps = 1;
      for (int i = 0; i < pre; ++i) ps *= p;
      const std::size_t need = (t - 1) * ps + 1;
      if (need > avail) {
        why = "newform fixtures have " + std::to_string(avail) + " coefficients; " + std::to_string(pre) + " pre-iterations need " + std::to_string(need);
        break;
      }
      auto fs = detail::newform_series(ring, f, need);
      auto th = theta_inverse(ring, p_deplete(ring, fs, p));
      auto gs = detail::newform_series(ring, g, need);
      auto img = u_power_of_product(ring, th, gs, ps, t);
      x = catalog_coordinates(cat, sinv, img);
      auto res = catalog_residual(cat, x, img, t);
      int rv = ring.digits();
      for (const auto& e : res) rv = std::min(rv, ring.valuation(e));
      int deficit = 0;
      for (std::size_t w = 0; w < d; ++w)
        if (!ring.is_zero(x[w])) deficit = std::max(deficit, shift[w] - ring.valuation(x[w]));
      if (std::getenv("KATZ_TRACE")) std::cerr << "[katz] pre-iterations " << pre << ": residual " << rv << ", lattice deficit " << deficit << "\n";
      if (deficit <= 0 && rv >= mu) {
        out.pre_iterations = pre;
        out.fit_valuation = rv;
        fitted = true;
        break;
      }
      why = "U_p^" + std::to_string(pre) + "(H) does not fit the catalog (residual " + std::to_string(rv) + ", deficit " + std::to_string(deficit) + ")";
    }
    if (!fitted) throw std::domain_error("lvalue: " + why);
    timer.mark("H in the catalog (" + std::to_string(out.pre_iterations) + " pre-iterations)");

    // scaled coordinates, projected
    std::vector<typename R::value_type> xs(d);
    for (std::size_t w = 0; w < d; ++w) {
      mpz_class v = ring.to_mpz(x[w]);
      if (v != 0) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), mpz_pow(p, shift[w]).get_mpz_t());
      xs[w] = r2.from_mpz(v);
    }
    auto xo = op.apply(xs);
    auto basis = ordinary_basis(op);
    timer.mark("ordinary basis");

    // q-expansions of scaled coordinate vectors
    auto to_series = [&](const std::vector<typename R::value_type>& c) {
      Series<R> s(len, r2.zero());
      for (std::size_t w = 0; w < d; ++w) {
        if (r2.is_zero(c[w])) continue;
        const auto cw = r2.from_mpz(r2.to_mpz(c[w]) * mpz_pow(p, shift[w]));
        for (std::size_t q = 0; q < len; ++q) s[q] = r2.add(s[q], r2.mul(cw, r2.from_mpz(ring.to_mpz(cat.rows[w][q]))));
      }
      return s;
    };
    std::vector<Series<R>> oq;
    for (const auto& b : basis) oq.push_back(to_series(b));
    auto hq = to_series(xo);
    const std::size_t rk = oq.size();
    const std::size_t limit = len / 16;
    detail::QSpan<R> span(r2, oq, limit);
    const int prec = mu - 1 - span.loss;
    if (std::getenv("KATZ_TRACE")) std::cerr << "[katz] ordinary span positions up to " << span.positions.back() << ", saturation loss " << span.loss << "\n";
    const int thr = prec / 2;

    // stabilized g and its U_p-eigenvalue
    typename R::value_type alpha;
    auto gq = detail::newform_series(r2, g, len);
    if (g.level % static_cast<int>(p) == 0) {
      alpha = gq[p];
      if (r2.valuation(alpha) != 0) throw std::domain_error("g is not p-ordinary");
    } else {
      Poly<R> hp{r2.from_int(static_cast<long long>(p)), r2.neg(gq[p]), r2.one()};
      auto sp = hensel_split(r2, hp, Rational(1, 2));
      if (sp.first.size() != 2) throw std::domain_error("g is not p-ordinary");
      alpha = r2.neg(sp.first[0]);
      const auto beta = r2.mul(r2.from_int(static_cast<long long>(p)), r2.inverse(alpha));
      auto vg = v_operator(r2, gq, p);
      for (std::size_t q = 0; q < len; ++q) gq[q] = r2.sub(gq[q], r2.mul(beta, vg[q]));
    }
    out.alpha = detail::to_padic(r2, alpha, prec);
    auto gc = span.coords(gq);
    if (span.residual(gq, gc, len) < thr) throw std::domain_error("g not found in the ordinary subspace (fixture mismatch or g not ordinary)");
    auto hc = span.coords(hq);
    if (span.residual(hq, hc, len) < thr) throw std::logic_error("projected H is not in the ordinary span");

    // operator matrices on the ordinary span (columns = images of basis forms)
    auto op_matrix = [&](auto&& apply_op) {
      std::vector<std::vector<typename R::value_type>> cols;
      for (const auto& o : span.basis) {
        auto im = apply_op(o);
        cols.push_back(span.coords(im));
      }
      return cols;
    };
    auto to_rows = [&](const std::vector<std::vector<typename R::value_type>>& cols, const typename R::value_type& e) {
      // rows of (M^T - e): row i = column i of M minus e at i
      std::vector<std::vector<PadicNumber>> rows(rk, std::vector<PadicNumber>(rk));
      for (std::size_t i = 0; i < rk; ++i)
        for (std::size_t j = 0; j < rk; ++j) {
          auto v = cols[i][j];
          if (i == j) v = r2.sub(v, e);
          rows[i][j] = detail::to_padic(r2, v, prec);
        }
      return rows;
    };
    std::vector<std::vector<std::vector<PadicNumber>>> system;
    system.push_back(to_rows(op_matrix([&](const Series<R>& s) { return u_operator(r2, s, p); }), alpha));
    std::optional<std::vector<PadicNumber>> w = detail::left_joint_eigenvector(system, rk, thr);
    const long level = static_cast<long>(n0) * static_cast<long>(p);
    for (u64 ell = 2; !w && ell <= opt.max_separation_prime; ++ell) {
      if (!is_prime(ell) || ell == p || level % static_cast<long>(ell) == 0) continue;
      if (len / ell <= span.positions.back()) throw std::domain_error("Hecke separation: q-precision too small for T_" + std::to_string(ell));
      system.push_back(to_rows(op_matrix([&](const Series<R>& s) { return hecke_T(r2, s, ell, 2, static_cast<u64>(level)); }), gq[ell]));
      out.separation_primes.push_back(ell);
      w = detail::left_joint_eigenvector(system, rk, thr);
    }
    if (!w) throw std::domain_error("Hecke separation failed for primes up to " + std::to_string(opt.max_separation_prime));
    timer.mark("Hecke separation");

    std::vector<PadicNumber> hv(rk), gv(rk);
    for (std::size_t i = 0; i < rk; ++i) {
      hv[i] = detail::to_padic(r2, hc[i], prec);
      gv[i] = detail::to_padic(r2, gc[i], prec);
    }
    auto lam = padic_div(detail::dot(*w, hv), detail::dot(*w, gv));
    // undo the pre-iterations: the g-component of U^t H is alpha^t lambda
    for (int i = 0; i < out.pre_iterations; ++i) lam = padic_div(lam, out.alpha);
    out.lambda = lam;
    return 0;
  });
  return out;
}

}  // namespace katz
