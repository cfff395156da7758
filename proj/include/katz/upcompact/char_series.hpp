#pragma once

#include "katz/modspaces/dimension.hpp"
#include "katz/modspaces/fixtures.hpp"
#include "katz/modspaces/spaces.hpp"
#include "katz/padic/charpoly.hpp"
#include "katz/padic/newton.hpp"
#include "katz/upcompact/catalog.hpp"

#include <gmpxx.h>

#include <chrono>
#include <cstdlib>
#include <iostream>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace katz {

struct SlopeOptions {
  int safety = 1;
  int buffer = 8;          ///< guard digits above m
  int extra_blocks = 0;    ///< added to block_count
  std::size_t t_margin = 16;
  std::size_t extra_t = 0;  ///< added to T
  std::vector<int> twists;  ///< extra twists whose matrices are floor-checked (diagnostics)
  std::optional<int> base_weight;  ///< force k0 (must be congruent to k mod n(p-1))
};

/// Characteristic series det(1 - t U_p) on weight k, with certification data.
struct CharSeries {
  u64 p = 0;
  int level = 1, weight = 0, k0 = 0, j = 0, m = 0, blocks = 0;
  std::size_t q_precision = 0, dim = 0;
  int mu = 0;          ///< digits carried for the scaled matrix
  int mu_eff = 0;      ///< digits actually trusted after truncation
  int big_digits = 0;  ///< digits used for the characteristic polynomial
  std::vector<int> block_dims;
  std::vector<mpz_class> coeffs;          ///< unscaled c_s mod p^precision[s]
  std::vector<int> precision;             ///< absolute precision of coeffs[s]
  std::vector<std::optional<int>> valuation;  ///< exact v_p(c_s) where determined
  std::vector<Rational> lower_bound;      ///< lower bound for v_p(c_s)
  std::vector<NewtonSegment> certified;   ///< slopes below the cutoff, with multiplicity
  Rational certified_cutoff{0};           ///< m - safety, lowered if the computed range ends first
  std::vector<NewtonSegment> proven;      ///< slopes below proven_cutoff
  Rational proven_cutoff{0};              ///< from the worst-case perturbation bound
  std::size_t entry_floor_violations = 0;
  std::size_t coefficient_floor_violations = 0;
  bool limited_by_range = false;  ///< the readout stopped at coefficients that vanished at the working precision
  std::map<std::string, std::string> provenance;
};

namespace detail {

/// Phase timings on stderr when KATZ_TRACE is set.
class PhaseTimer {
 public:
  PhaseTimer() : on_(std::getenv("KATZ_TRACE") != nullptr), t_(std::chrono::steady_clock::now()) {}
  void mark(const std::string& what) {
    if (!on_) return;
    auto now = std::chrono::steady_clock::now();
    std::cerr << "[katz] " << what << ": " << std::chrono::duration<double>(now - t_).count() << " s\n";
    t_ = now;
  }

 private:
  bool on_;
  std::chrono::steady_clock::time_point t_;
};

struct ScaledMatrix {
  std::size_t dim = 0;
  std::vector<mpz_class> a;  // row-major, reduced mod p^mu
  std::vector<int> block_of_row;
  std::vector<int> block_dims;
  std::size_t q_precision = 0;
  std::size_t violations = 0;
  std::map<std::string, std::string> provenance;
};

template <class R>
ScaledMatrix scaled_matrix(const R& ring, const FixtureSet& fx, int k0, int blocks, int j, int mu,
                           const SlopeOptions& opt) {
  const u64 p = ring.p();
  auto cfg = EisensteinConfig::for_prime(p);
  const int n = cfg.n;
  PhaseTimer timer;
  SpaceBuilder<R> sb(ring, cfg, fx, k0 + blocks * cfg.weight);
  timer.mark("spaces (" + std::to_string(sb.candidates_tried()) + " candidates)");
  auto cat = build_catalog(sb, k0, blocks, opt.t_margin, opt.extra_t);
  timer.mark("catalog");
  auto cm = up_matrix(cat, j);
  timer.mark("U_p matrix");
  ScaledMatrix out;
  out.dim = cat.dim();
  out.block_of_row = cat.block_of_row;
  out.block_dims = cat.block_dims();
  out.q_precision = cat.q_precision;
  out.violations = cm.floor_violations();
  out.provenance = cat.provenance;
  for (int tw : opt.twists) out.violations += up_matrix(cat, tw).floor_violations();
  const mpz_class mod = mpz_pow(p, mu);
  out.a.resize(out.dim * out.dim);
  for (std::size_t w = 0; w < out.dim; ++w)
    for (std::size_t u = 0; u < out.dim; ++u) {
      const int sh = block_shift(p, n, cat.block_of_row[u]) - block_shift(p, n, cat.block_of_row[w]);
      mpz_class x = ring.to_mpz(cm.a(w, u));
      if (sh >= 0) {
        x *= mpz_pow(p, sh);
      } else {
        if (ring.valuation(cm.a(w, u)) < -sh)
          throw std::logic_error("scaled matrix is not integral at (" + std::to_string(w) + "," + std::to_string(u) + ")");
        mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), mpz_pow(p, -sh).get_mpz_t());
      }
      mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), mod.get_mpz_t());
      out.a[w * out.dim + u] = x;
    }
  return out;
}

template <class R>
Matrix<R> to_ring_matrix(const R& ring, const std::vector<mpz_class>& a, std::size_t d) {
  Matrix<R> m = zero_matrix(ring, d, d);
  for (std::size_t i = 0; i < d * d; ++i) m.a[i] = ring.from_mpz(a[i]);
  return m;
}

}  // namespace detail

namespace detail {

/// Characteristic polynomial of the lifted Hessenberg matrix to big_digits,
/// read two ways: valuations of the lift below big_digits (the slope readout),
/// and the worst-case bound where c_s is known to p^(mu_eff + H_{s-1}).
inline void certify(CharSeries& cs, const std::vector<mpz_class>& hess, const std::vector<std::int64_t>& hsum,
                    const SlopeOptions& opt) {
  const u64 p = cs.p;
  const int n = EisensteinConfig::for_prime(p).n;
  const std::size_t d = cs.dim;
  const int big = cs.big_digits;

  std::vector<mpz_class> scaled(d + 1);
  with_ring(p, big, [&](const auto& ring) {
    auto h = to_ring_matrix(ring, hess, d);
    auto chi = charpoly_hessenberg(ring, h);
    auto c = char_series_from_charpoly(ring, chi, d);
    for (std::size_t s = 0; s <= d; ++s) scaled[s] = ring.to_mpz(c[s]);
    return 0;
  });

  const Rational one(1);
  std::vector<NewtonPoint> read_pts, proof_pts;
  std::vector<bool> read_exact(d + 2, false), proof_exact(d + 2, false);
  cs.coeffs.assign(d + 1, 0);
  cs.precision.assign(d + 1, 0);
  cs.valuation.assign(d + 1, std::nullopt);
  cs.lower_bound.assign(d + 1, Rational(0));
  cs.coefficient_floor_violations = 0;
  const mpz_class pz = static_cast<unsigned long>(p);
  for (std::size_t s = 0; s <= d; ++s) {
    const auto ss = static_cast<std::int64_t>(s);
    const Rational fl = coefficient_floor(p, n, cs.block_dims, ss) + Rational(ss);
    int v = big;
    if (scaled[s] != 0) {
      mpz_class t;
      v = static_cast<int>(mpz_remove(t.get_mpz_t(), scaled[s].get_mpz_t(), pz.get_mpz_t()));
    }
    const int prec = s == 0 ? big : static_cast<int>(std::min<std::int64_t>(cs.mu_eff + hsum[s - 1], big));
    // c_D of the truncated matrix says nothing about the multiplicity of its last slope
    if (v < big && (s < d || d == 0)) {
      read_exact[s] = true;
      read_pts.emplace_back(ss, Rational(v));
      cs.valuation[s] = v - static_cast<int>(s);
    } else {
      read_pts.emplace_back(ss, std::max(Rational(big), fl));
    }
    Rational lb;
    if (v < prec && (s < d || d == 0)) {
      proof_exact[s] = true;
      lb = Rational(v);
    } else {
      lb = std::max(Rational(prec), fl);
    }
    proof_pts.emplace_back(ss, lb);
    cs.lower_bound[s] = lb - Rational(ss);
    // unscaled coefficient: divide by p^s
    cs.precision[s] = big - static_cast<int>(s);
    if (cs.precision[s] > 0) {
      if (v < static_cast<int>(s)) throw std::logic_error("scaled c_" + std::to_string(s) + " not divisible by p^s");
      mpz_class x;
      mpz_divexact(x.get_mpz_t(), scaled[s].get_mpz_t(), mpz_pow(p, static_cast<int>(s)).get_mpz_t());
      cs.coeffs[s] = x;
    }
    // floor check on the unscaled coefficient
    if (s > 0 && cs.precision[s] > 0) {
      const int cap = cs.precision[s];
      const int vu = std::min(v - static_cast<int>(s), cap);
      const int need = static_cast<int>(std::min<std::int64_t>(ceil(fl - Rational(ss)), cap));
      if (vu < need) ++cs.coefficient_floor_violations;
    }
  }
  {
    const auto s = static_cast<std::int64_t>(d + 1);
    const Rational tail = coefficient_floor(p, n, cs.block_dims, s) + Rational(s);
    read_pts.emplace_back(s, tail);
    proof_pts.emplace_back(s, tail);
  }

  // prefix of the hull whose vertices are determined
  auto prefix = [&](const std::vector<NewtonPoint>& pts, const std::vector<bool>& exact, Rational cut,
                    std::vector<NewtonSegment>& out, bool* limited) {
    auto hull = newton_polygon(pts);
    std::vector<NewtonSegment> segs;
    if (limited) *limited = false;
    for (std::size_t i = 0; i < hull.segments.size(); ++i) {
      const auto right = static_cast<std::size_t>(hull.vertices[i + 1].first);
      const Rational slope = hull.segments[i].slope - one;
      if (right > d || !exact[right]) {
        if (slope < cut) {
          if (limited) *limited = right <= d;
          cut = slope;
        }
        break;
      }
      segs.push_back({slope, hull.segments[i].width});
    }
    out.clear();
    for (const auto& sg : segs)
      if (sg.slope < cut) out.push_back(sg);
    return cut;
  };
  const Rational target(cs.m - opt.safety);
  cs.certified_cutoff = prefix(read_pts, read_exact, target, cs.certified, &cs.limited_by_range);
  cs.proven_cutoff = prefix(proof_pts, proof_exact, target, cs.proven, nullptr);
}

}  // namespace detail

/// Characteristic series of U_p on M_k^dagger(Gamma_0(N)), k = k0 + j n(p-1).
///
/// The matrix of p U_p o G^j on the catalog is rescaled by the block shifts
/// (a diagonal similarity) so it is integral with rows divisible roughly like
/// the Hodge polygon, reduced to Hessenberg form over Z/p^mu, and its
/// characteristic polynomial is taken with enough digits that coefficient s
/// is known to p^(mu_eff + H_{s-1}), H the partial sums of elementary
/// divisors. Slopes are certified up to the first hull vertex whose
/// valuation is only bounded below.
inline CharSeries char_series_for_weight(int level, int k, u64 p, int m, const FixtureSet& fx,
                                         const SlopeOptions& opt = {}) {
  if (m < 1) throw std::invalid_argument("m must be positive");
  if (!is_prime(p)) throw std::invalid_argument("p must be prime");
  if (level % static_cast<int>(p) == 0) throw std::invalid_argument("p must not divide the level");
  auto cfg = EisensteinConfig::for_prime(p);
  const int n = cfg.n;
  auto sp = split_weight(k, cfg);
  if (opt.base_weight) {
    const int k0 = *opt.base_weight;
    if (k0 < 0 || k0 % 2 || ((k - k0) % cfg.weight) != 0)
      throw std::invalid_argument("base weight " + std::to_string(k0) + " is not congruent to " + std::to_string(k));
    sp = {k0, (k - k0) / cfg.weight};
  }
  CharSeries cs;
  cs.p = p;
  cs.level = level;
  cs.weight = k;
  cs.k0 = sp.k0;
  cs.j = sp.j;
  cs.m = m;
  cs.blocks = block_count(p, n, m, opt.safety) + opt.extra_blocks;
  cs.mu = m + opt.buffer;
  const int abs_digits = cs.mu + block_shift(p, n, cs.blocks) + 1;
  detail::PhaseTimer timer;

  auto sm = with_ring(p, abs_digits, [&](const auto& ring) {
    return detail::scaled_matrix(ring, fx, sp.k0, cs.blocks, sp.j, cs.mu, opt);
  });
  timer.mark("catalog + matrix (dim " + std::to_string(sm.dim) + ", T " + std::to_string(sm.q_precision) + ")");
  const std::size_t d = sm.dim;
  cs.dim = d;
  cs.q_precision = sm.q_precision;
  cs.block_dims = sm.block_dims;
  cs.entry_floor_violations = sm.violations;
  cs.provenance = sm.provenance;

  // truncation: everything outside the catalog enters through block I+1
  int trunc = cs.mu;
  for (std::size_t u = 0; u < cs.block_dims.size(); ++u)
    if (cs.block_dims[u] > 0)
      trunc = std::min(trunc, entry_floor(p, n, cs.blocks + 1, static_cast<int>(u)) + block_shift(p, n, static_cast<int>(u)) -
                                  block_shift(p, n, cs.blocks + 1));
  cs.mu_eff = std::max(0, trunc);

  // Hodge data and Hessenberg form over Z/p^mu
  std::vector<int> hodge;
  std::vector<mpz_class> hess;
  with_ring(p, cs.mu, [&](const auto& ring) {
    auto a = detail::to_ring_matrix(ring, sm.a, d);
    hodge = elementary_divisor_valuations(ring, a);
    hessenberg_reduce(ring, a);
    hess.resize(d * d);
    for (std::size_t i = 0; i < d * d; ++i) hess[i] = ring.to_mpz(a.a[i]);
    return 0;
  });
  for (auto& h : hodge) h = std::min(h, cs.mu_eff);
  std::vector<std::int64_t> hsum(d + 1, 0);
  for (std::size_t s = 0; s < d; ++s) hsum[s + 1] = hsum[s] + hodge[s];

  timer.mark("hodge + hessenberg");

  // The readout needs every coefficient on the hull below slope m to be
  // nonzero at the working precision; the precision doubles until it is.
  std::size_t slim = 0;
  while (slim < d && hodge[slim] <= m + 1) ++slim;
  cs.big_digits = std::max(cs.mu + 2, cs.mu_eff + static_cast<int>(slim ? hsum[slim - 1] : 0) + 2);
  for (;;) {
    detail::certify(cs, hess, hsum, opt);
    timer.mark("charpoly (" + std::to_string(cs.big_digits) + " digits)");
    if (!cs.limited_by_range) break;
    cs.big_digits *= 2;
  }
  return cs;
}

}  // namespace katz
