#pragma once

#include "katz/modspaces/dimension.hpp"
#include "katz/modspaces/fixtures.hpp"
#include "katz/padic/ring.hpp"
#include "katz/qexp/eisenstein.hpp"
#include "katz/qexp/series.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace katz {

/// Raised when products of lower-weight forms do not span M_k mod p.
class SpanDeficiency : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Echelonised basis of M_k(Gamma_0(N)) over Z/p^M: pivot coefficients are 1
/// and every row vanishes at the other rows' pivots.
template <class R>
struct SpaceBasis {
  int level = 1;
  int weight = 0;
  std::size_t q_precision = 0;
  std::vector<Series<R>> rows;
  std::vector<std::size_t> pivots;
  std::size_t dim() const { return rows.size(); }
};

/// One complementary block W_i of the Katz expansion.
template <class R>
struct ComplementBlock {
  int index = 0;
  int weight = 0;
  std::vector<Series<R>> members;
  std::vector<std::size_t> pivots;  ///< new mod-p pivots contributed by the block
  std::size_t dim() const { return members.size(); }
};

/// Reduced row echelon form over Z/p^M with unit pivots, pivots chosen by
/// smallest exponent. Throws if some row is not independent mod p.
template <class R>
SpaceBasis<R> echelonize(const R& ring, std::vector<Series<R>> rows, int level, int weight) {
  SpaceBasis<R> b;
  b.level = level;
  b.weight = weight;
  b.q_precision = rows.empty() ? 0 : rows[0].size();
  const std::size_t n = rows.size(), t = b.q_precision;
  std::vector<bool> used(n, false);
  std::vector<std::pair<std::size_t, std::size_t>> piv;  // (column, row)
  for (std::size_t col = 0; col < t && piv.size() < n; ++col) {
    std::size_t r = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i] && ring.valuation(rows[i][col]) == 0) { r = i; break; }
    if (r == n) continue;
    used[r] = true;
    auto inv = ring.inverse(rows[r][col]);
    for (auto& c : rows[r]) c = ring.mul(c, inv);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == r || ring.is_zero(rows[i][col])) continue;
      auto f = rows[i][col];
      for (std::size_t j = 0; j < t; ++j) rows[i][j] = ring.sub(rows[i][j], ring.mul(f, rows[r][j]));
    }
    piv.emplace_back(col, r);
  }
  if (piv.size() != n)
    throw std::domain_error("echelonize: rows are dependent mod p (non-unit pivot) at weight " + std::to_string(weight));
  for (auto [col, r] : piv) {
    b.pivots.push_back(col);
    b.rows.push_back(std::move(rows[r]));
  }
  return b;
}

/// Level-one basis from monomials E4^a E6^b Delta^c.
template <class R>
SpaceBasis<R> level1_basis(const R& ring, int k, std::size_t t) {
  if (k < 0 || k % 2) throw std::invalid_argument("level1_basis: weight must be even and non-negative");
  std::vector<Series<R>> rows;
  if (k == 0) return echelonize(ring, {series_one(ring, t)}, 1, 0);
  auto e4 = eisenstein(ring, 4, t), e6 = eisenstein(ring, 6, t), d = delta(ring, t);
  Series<R> dpow = series_one(ring, t);
  for (int c = 0; 12 * c <= k; ++c) {
    int rest = k - 12 * c;
    // rest = 4a + 6b with b <= 1
    std::optional<std::pair<int, int>> ab;
    for (int b = 0; b <= 1 && !ab; ++b)
      if (rest >= 6 * b && (rest - 6 * b) % 4 == 0) ab = {(rest - 6 * b) / 4, b};
    if (ab) {
      Series<R> m = dpow;
      for (int i = 0; i < ab->first; ++i) m = series_mul(ring, m, e4);
      for (int i = 0; i < ab->second; ++i) m = series_mul(ring, m, e6);
      rows.push_back(m);
    }
    dpow = series_mul(ring, dpow, d);
  }
  return echelonize(ring, rows, 1, k);
}

/// Builds integral bases of M_k(Gamma_0(N)) for all even k up to a bound as
/// products of generators (fixture forms of weights 2, 4 and 6, or E4, E6 at
/// level one, and Delta), accepted greedily when they raise the rank mod p.
///
/// Since E = 1 mod p, M_k mod p = E M_{k-w} mod p + W(k) mod p, so for each
/// weight only the complement W(k) is built. Each member is seed * base * E^a
/// with base a member of some lower W. Ranks are detected mod p on the first
/// Sturm-bound coefficients; full-length expansions are built on demand.
template <class R>
class SpaceBuilder {
 public:
  SpaceBuilder(const R& ring, const EisensteinConfig& cfg, const FixtureSet& fx, int max_weight)
      : ring_(ring), fp_(ring.p(), 1), cfg_(cfg), fx_(fx), level_(fx.level), kmax_(max_weight) {
    if (ring.p() != cfg.p) throw std::invalid_argument("SpaceBuilder: prime mismatch");
    if (max_weight < 0) throw std::invalid_argument("SpaceBuilder: negative weight");
    smax_ = static_cast<std::size_t>(sturm_bound(level_, std::max(kmax_, 2))) + 2;
    build_seeds();
    build_spaces();
  }

  const R& ring() const { return ring_; }
  int level() const { return level_; }
  int max_weight() const { return kmax_; }
  const EisensteinConfig& config() const { return cfg_; }
  std::size_t short_length() const { return smax_; }

  /// Mod-p pivot set of M_k, ascending.
  std::vector<std::size_t> pivots(int k) const {
    std::vector<std::size_t> out;
    for (int id : chain_.at(k)) out.push_back(reduced_[static_cast<std::size_t>(id)].pivot);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Mod-p pivots contributed by W(k) (those not already pivots of M_{k-w}),
  /// in the order of complement(k, .).
  std::vector<std::size_t> new_pivots(int k) const {
    std::vector<std::size_t> out;
    for (int id : w_.at(k)) out.push_back(reduced_[static_cast<std::size_t>(id)].pivot);
    return out;
  }

  std::size_t complement_dim(int k) const { return w_.at(k).size(); }

  /// Full-length expansion of every member of W(k), at precision t.
  std::vector<Series<R>> complement(int k, std::size_t t) {
    std::vector<Series<R>> out;
    for (int id : w_.at(k)) out.push_back(truncate<R>(full(id, t), t));
    return out;
  }

  /// All of M_k as products E^a w, w in W(k - a n(p-1)), ordered by mod-p pivot.
  std::vector<Series<R>> space(int k, std::size_t t) {
    std::vector<std::pair<std::size_t, Series<R>>> rows;
    for (int id : chain_.at(k)) {
      const int a = (k - elements_[static_cast<std::size_t>(id)].weight) / cfg_.weight;
      auto f = a == 0 ? truncate<R>(full(id, t), t) : series_mul(ring_, full(id, t), e_power(a, t), t);
      rows.emplace_back(reduced_[static_cast<std::size_t>(id)].pivot, std::move(f));
    }
    std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<Series<R>> out;
    for (auto& r : rows) out.push_back(std::move(r.second));
    return out;
  }

  /// Echelonised basis of M_k at precision t.
  SpaceBasis<R> basis(int k, std::size_t t) {
    std::vector<Series<R>> rows;
    for (int kk = k, a = 0; kk >= 0; kk -= cfg_.weight, ++a) {
      if (!w_.count(kk)) continue;
      auto epow = e_power(a, t);
      for (int id : w_.at(kk)) rows.push_back(series_mul(ring_, full(id, t), epow, t));
    }
    return echelonize(ring_, rows, level_, k);
  }

  /// Digest of the generator inputs (fixture hashes).
  std::map<std::string, std::string> provenance() const { return fx_.digests(); }

  /// Number of candidate products tried (for diagnostics).
  std::size_t candidates_tried() const { return tried_; }

 private:
  struct Seed {
    int weight = 0;
    std::vector<u64> modp;
    std::vector<mpz_class> exact;  // fixture coefficients, if any
    int kind = 0;                  // 0 fixture, 1 E4, 2 E6, 3 Delta
  };
  struct Element {
    int weight = 0;
    int seed = -1;  // -1: the constant 1
    int base = -1;  // element index, -1: none
    int epow = 0;
  };
  struct Reduced {
    std::size_t pivot = 0;
    std::vector<u64> v;  // normalised so v[pivot] = 1
  };

  void build_seeds() {
    const u64 p = ring_.p();
    auto reduce_row = [&](const std::vector<mpz_class>& row) {
      std::vector<u64> v(smax_, 0);
      for (std::size_t i = 0; i < smax_; ++i) {
        mpz_class r = row[i] % static_cast<unsigned long>(p);
        if (r < 0) r += static_cast<unsigned long>(p);
        v[i] = r.get_ui();
      }
      return v;
    };
    if (level_ == 1) {
      for (int kind = 1; kind <= 3; ++kind) {
        Seed s;
        s.kind = kind;
        s.weight = kind == 1 ? 4 : (kind == 2 ? 6 : 12);
        s.modp = level_one_modp(kind);
        seeds_.push_back(std::move(s));
      }
      return;
    }
    for (int k : {2, 4})
      if (!fx_.find(k))
        throw MissingFixture("missing fixture for level " + std::to_string(level_) + " weight " + std::to_string(k) +
                             " (supply a fixture for this weight)");
    for (const auto& [k, rb] : fx_.bases) {
      if (rb.q_precision < smax_)
        throw MissingFixture("fixture " + FixtureSet::basis_name(level_, k) + " has q-precision " +
                             std::to_string(rb.q_precision) + " < " + std::to_string(smax_) + " needed");
      if (static_cast<std::int64_t>(rb.rows.size()) != dimension(level_, k))
        throw std::runtime_error("fixture " + FixtureSet::basis_name(level_, k) + " has wrong dimension");
      // echelonise mod p; the same integer combinations keep the rows a basis
      // over Z_(p) and give them distinct leading exponents
      const std::size_t dk = rb.rows.size();
      std::vector<std::vector<u64>> red(dk);
      std::vector<std::vector<u64>> tr(dk, std::vector<u64>(dk, 0));
      for (std::size_t i = 0; i < dk; ++i) {
        red[i] = reduce_row(rb.rows[i]);
        tr[i][i] = 1;
      }
      std::vector<bool> done(dk, false);
      for (std::size_t col = 0; col < smax_; ++col) {
        std::size_t r = dk;
        for (std::size_t i = 0; i < dk; ++i)
          if (!done[i] && red[i][col]) { r = i; break; }
        if (r == dk) continue;
        done[r] = true;
        const u64 inv = fp_.inverse(red[r][col]);
        for (auto& x : red[r]) x = x * inv % p;
        for (auto& x : tr[r]) x = x * inv % p;
        for (std::size_t i = 0; i < dk; ++i) {
          if (i == r || !red[i][col]) continue;
          const u64 f = p - red[i][col];
          for (std::size_t q = 0; q < smax_; ++q) red[i][q] = (red[i][q] + f * red[r][q]) % p;
          for (std::size_t q = 0; q < dk; ++q) tr[i][q] = (tr[i][q] + f * tr[r][q]) % p;
        }
      }
      for (std::size_t i = 0; i < dk; ++i) {
        if (!done[i]) throw std::runtime_error("fixture " + FixtureSet::basis_name(level_, k) + " is not independent mod p");
        Seed s;
        s.weight = k;
        s.kind = 0;
        s.exact.assign(rb.rows[0].size(), 0);
        for (std::size_t q = 0; q < dk; ++q) {
          if (!tr[i][q]) continue;
          const unsigned long c = static_cast<unsigned long>(tr[i][q]);
          for (std::size_t t = 0; t < s.exact.size(); ++t) s.exact[t] += c * rb.rows[q][t];
        }
        s.modp = std::move(red[i]);
        seeds_.push_back(std::move(s));
      }
    }
    Seed d;
    d.weight = 12;
    d.kind = 3;
    d.modp = level_one_modp(3);
    seeds_.push_back(std::move(d));
  }

  std::vector<u64> level_one_modp(int kind) const {
    Series<Mod64> s = kind == 1 ? eisenstein(fp_, 4, smax_) : (kind == 2 ? eisenstein(fp_, 6, smax_) : delta(fp_, smax_));
    return s;
  }

  std::vector<u64> modp_product(const std::vector<u64>& a, const std::vector<u64>& b, std::size_t len) const {
    const u64 p = ring_.p();
    std::size_t la = 0, lb = 0;
    while (la < len && a[la] == 0) ++la;
    while (lb < len && b[lb] == 0) ++lb;
    std::vector<u64> out(len, 0);
    if (la + lb >= len) return out;
    // products stay far below 2^64 for the primes of interest; reduce periodically otherwise
    const bool small = p < (1ull << 20);
    for (std::size_t n = la + lb; n < len; ++n) {
      u64 acc = 0;
      for (std::size_t i = la; i + lb <= n; ++i) {
        acc += a[i] * b[n - i];
        if (!small) acc %= p;
      }
      out[n] = acc % p;
    }
    return out;
  }

  /// Reduces v against the echelon list; returns the first nonzero index or len.
  std::size_t reduce_against(std::vector<u64>& v, const std::vector<int>& ech, std::size_t len) const {
    const u64 p = ring_.p();
    for (int id : ech) {
      const auto& r = reduced_[static_cast<std::size_t>(id)];
      if (r.pivot >= len) continue;
      u64 c = v[r.pivot];
      if (!c) continue;
      u64 m = p - c;
      for (std::size_t j = r.pivot; j < len; ++j)
        if (r.v[j]) v[j] = (v[j] + m * r.v[j]) % p;
    }
    for (std::size_t j = 0; j < len; ++j)
      if (v[j]) return j;
    return len;
  }

  void insert_sorted(std::vector<int>& ech, int id) {
    auto piv = reduced_[static_cast<std::size_t>(id)].pivot;
    auto it = std::lower_bound(ech.begin(), ech.end(), piv,
                               [&](int a, std::size_t pv) { return reduced_[static_cast<std::size_t>(a)].pivot < pv; });
    ech.insert(it, id);
  }

  void accept(int k, const Element& el, std::vector<u64> modp_full, std::vector<int>& ech) {
    const u64 p = ring_.p();
    std::size_t piv = reduce_against(modp_full, ech, smax_);
    if (piv == smax_) throw std::logic_error("SpaceBuilder: accepted a dependent candidate");
    u64 inv = fp_.inverse(modp_full[piv]);
    for (auto& x : modp_full) x = (x * inv) % p;
    int id = static_cast<int>(elements_.size());
    elements_.push_back(el);
    modp_.push_back({});
    reduced_.push_back({piv, std::move(modp_full)});
    w_[k].push_back(id);
    insert_sorted(ech, id);
  }

  const std::vector<u64>& element_modp(int id) {
    auto& slot = modp_[static_cast<std::size_t>(id)];
    if (!slot.empty()) return slot;
    const auto& el = elements_[static_cast<std::size_t>(id)];
    if (el.seed < 0) {
      slot.assign(smax_, 0);
      slot[0] = 1;
    } else if (el.base < 0) {
      slot = seeds_[static_cast<std::size_t>(el.seed)].modp;
    } else {
      slot = modp_product(seeds_[static_cast<std::size_t>(el.seed)].modp, element_modp(el.base), smax_);
    }
    return slot;
  }

  void build_spaces() {
    const int w = cfg_.weight;
    // weight 0: the constants
    elements_.push_back({0, -1, -1, 0});
    modp_.push_back({});
    {
      std::vector<u64> one(smax_, 0);
      one[0] = 1;
      reduced_.push_back({0, one});
    }
    w_[0] = {0};
    chain_[0] = {0};
    for (int k = 2; k <= kmax_; k += 2) {
      std::vector<int> ech = (k >= w && chain_.count(k - w)) ? chain_[k - w] : std::vector<int>{};
      const std::int64_t target = dimension(level_, k);
      w_[k] = {};
      if (static_cast<std::int64_t>(ech.size()) > target)
        throw std::logic_error("SpaceBuilder: lower space larger than M_k");
      const std::size_t sk = std::min<std::size_t>(smax_, static_cast<std::size_t>(sturm_bound(level_, k)) + 1);
      if (static_cast<std::int64_t>(ech.size()) < target) {
        // candidates seed * base * E^a ordered by leading exponent, highest first
        struct Cand { std::size_t lead; int seed, base, epow; };
        std::vector<Cand> cands;
        for (std::size_t s = 0; s < seeds_.size(); ++s) {
          const int ws = seeds_[s].weight;
          std::size_t ls = 0;
          while (ls < smax_ && seeds_[s].modp[ls] == 0) ++ls;
          for (int a = 0; ws + a * w <= k; ++a) {
            int kb = k - ws - a * w;
            if (!w_.count(kb)) continue;
            for (int b : w_[kb]) {
              const auto& bm = element_modp(b);
              std::size_t lb = 0;
              while (lb < smax_ && bm[lb] == 0) ++lb;
              if (ls + lb >= sk) continue;
              cands.push_back({ls + lb, static_cast<int>(s), kb == 0 ? -1 : b, a});
            }
          }
        }
        std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) { return x.lead > y.lead; });
        // a leading exponent that is not yet a pivot gives a new pivot without reduction
        std::vector<bool> is_pivot(sk, false);
        for (int id : ech)
          if (reduced_[static_cast<std::size_t>(id)].pivot < sk) is_pivot[reduced_[static_cast<std::size_t>(id)].pivot] = true;
        std::vector<bool> used(cands.size(), false);
        for (std::size_t ci = 0; ci < cands.size(); ++ci) {
          const auto& c = cands[ci];
          if (static_cast<std::int64_t>(ech.size()) >= target) break;
          if (is_pivot[c.lead]) continue;
          ++tried_;
          used[ci] = true;
          const auto& sm = seeds_[static_cast<std::size_t>(c.seed)].modp;
          std::vector<u64> fullv = c.base < 0 ? sm : modp_product(sm, element_modp(c.base), smax_);
          accept(k, {k, c.seed, c.base, c.epow}, std::move(fullv), ech);
          is_pivot[c.lead] = true;
        }
        for (std::size_t ci = 0; ci < cands.size(); ++ci) {
          const auto& c = cands[ci];
          if (static_cast<std::int64_t>(ech.size()) >= target) break;
          if (used[ci]) continue;
          ++tried_;
          const auto& sm = seeds_[static_cast<std::size_t>(c.seed)].modp;
          std::vector<u64> v = c.base < 0 ? std::vector<u64>(sm.begin(), sm.begin() + static_cast<std::ptrdiff_t>(sk))
                                          : modp_product(sm, element_modp(c.base), sk);
          std::vector<u64> probe = v;
          if (reduce_against(probe, ech, sk) == sk) continue;
          std::vector<u64> fullv = c.base < 0 ? sm : modp_product(sm, element_modp(c.base), smax_);
          accept(k, {k, c.seed, c.base, c.epow}, std::move(fullv), ech);
        }
      }
      if (static_cast<std::int64_t>(ech.size()) != target)
        throw SpanDeficiency("level " + std::to_string(level_) + " weight " + std::to_string(k) + ": products span rank " +
                             std::to_string(ech.size()) + " < dimension " + std::to_string(target) +
                             " (supply a fixture for this weight)");
      chain_[k] = std::move(ech);
      std::sort(w_[k].begin(), w_[k].end(), [&](int a, int b) {
        return reduced_[static_cast<std::size_t>(a)].pivot < reduced_[static_cast<std::size_t>(b)].pivot;
      });
    }
  }

  Series<R> seed_full(int s, std::size_t t) {
    auto& cache = seed_full_[s];
    if (cache.size() >= t) return truncate<R>(cache, t);
    const auto& sd = seeds_[static_cast<std::size_t>(s)];
    if (sd.kind == 0) {
      if (sd.exact.size() < t)
        throw MissingFixture("fixture q-precision " + std::to_string(sd.exact.size()) + " is below the required " +
                             std::to_string(t) + " (regenerate fixtures with a larger T)");
      cache.resize(t);
      for (std::size_t i = 0; i < t; ++i) cache[i] = ring_.from_mpz(sd.exact[i]);
    } else if (sd.kind == 1) {
      cache = eisenstein(ring_, 4, t);
    } else if (sd.kind == 2) {
      cache = eisenstein(ring_, 6, t);
    } else {
      cache = delta(ring_, t);
    }
    return cache;
  }

  Series<R> e_power(int a, std::size_t t) {
    if (epow_len_ < t) {
      epow_.clear();
      epow_len_ = t;
    }
    while (static_cast<int>(epow_.size()) <= a) {
      if (epow_.empty()) epow_.push_back(series_one(ring_, t));
      else if (epow_.size() == 1) epow_.push_back(e_series(ring_, cfg_, t));
      else epow_.push_back(series_mul(ring_, epow_.back(), epow_[1]));
    }
    return truncate<R>(epow_[static_cast<std::size_t>(a)], t);
  }

  const Series<R>& full(int id, std::size_t t) {
    auto& cache = full_[id];
    if (cache.size() >= t) return cache;
    const auto el = elements_[static_cast<std::size_t>(id)];
    Series<R> s;
    if (el.seed < 0) s = series_one(ring_, t);
    else if (el.base < 0) s = seed_full(el.seed, t);
    else s = series_mul(ring_, seed_full(el.seed, t), full(el.base, t), t);
    if (el.epow > 0) s = series_mul(ring_, s, e_power(el.epow, t), t);
    full_[id] = std::move(s);
    return full_[id];
  }

  R ring_;
  Mod64 fp_;
  EisensteinConfig cfg_;
  FixtureSet fx_;
  int level_;
  int kmax_;
  std::size_t smax_ = 0;
  std::size_t tried_ = 0;
  std::vector<Seed> seeds_;
  std::vector<Element> elements_;
  std::vector<std::vector<u64>> modp_;
  std::vector<Reduced> reduced_;
  std::map<int, std::vector<int>> w_;      // weight -> members of W(k)
  std::map<int, std::vector<int>> chain_;  // weight -> echelon ids of M_k mod p, by pivot
  std::map<int, Series<R>> seed_full_;
  std::map<int, Series<R>> full_;
  std::vector<Series<R>> epow_;
  std::size_t epow_len_ = 0;
};

/// Echelonised basis of M_k(Gamma_0(N)) at precision t.
template <class R>
SpaceBasis<R> levelN_basis(const R& ring, int level, int k, std::size_t t, const FixtureSet& fx) {
  if (k == 1) throw std::invalid_argument("weight 1 is not supported");
  if (level == 1) return level1_basis(ring, k, t);
  if (k < 0 || k % 2) return SpaceBasis<R>{level, k, t, {}, {}};
  SpaceBuilder<R> sb(ring, EisensteinConfig::for_prime(ring.p()), fx, k);
  return sb.basis(k, t);
}

/// Blocks 0..I of the Katz expansion in weights k0 + i n(p-1).
template <class R>
std::vector<ComplementBlock<R>> complement_blocks(SpaceBuilder<R>& sb, int k0, int blocks, std::size_t t) {
  const int w = sb.config().weight;
  if (k0 < 0 || k0 >= w || k0 % 2) throw std::invalid_argument("complement_blocks: k0 must be even in [0, n(p-1))");
  std::vector<ComplementBlock<R>> out;
  for (int i = 0; i <= blocks; ++i) {
    int k = k0 + i * w;
    ComplementBlock<R> b;
    b.index = i;
    b.weight = k;
    b.members = sb.complement(k, t);
    b.pivots = sb.new_pivots(k);
    std::int64_t expect = dimension(sb.level(), k) - (i ? dimension(sb.level(), k - w) : 0);
    if (static_cast<std::int64_t>(b.members.size()) != expect)
      throw std::logic_error("complement_blocks: block dimension mismatch at weight " + std::to_string(k));
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace katz
