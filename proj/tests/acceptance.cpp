// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include "katz/chowheegner/verify.hpp"
#include "katz/padic/charpoly.hpp"
#include "katz/padic/newton.hpp"
#include "katz/padic/poly.hpp"
#include "katz/slopes/slope_analysis.hpp"
#include "katz/upcompact/char_series.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace katz;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::vector<NewtonSegment> parse_list(const std::string& s) {
  std::vector<NewtonSegment> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    auto u = tok.find('_');
    out.push_back({parse_rational(tok.substr(0, u)), std::stoll(tok.substr(u + 1))});
  }
  return out;
}

/// Entries of a published (truncated) list against a certified sequence:
/// everything below the certified cutoff and up to the last published slope must agree.
Verdict against_published(const SlopeSequence& s, const std::string& published, const Rational& must_reach) {
  auto want_all = parse_list(published);
  const Rational last = want_all.back().slope;
  std::vector<NewtonSegment> want, got;
  for (const auto& e : want_all)
    if (e.slope < s.certified_cutoff) want.push_back(e);
  for (const auto& e : s.entries)
    if (!(last < e.slope)) got.push_back(e);
  Verdict v;
  v.pass = want == got && must_reach < s.certified_cutoff;
  v.detail = "N=" + std::to_string(s.level) + " k=" + std::to_string(s.weight) + " m=" + std::to_string(s.m) + " cutoff " +
             to_string(s.certified_cutoff) + ": " + format_slopes(s.entries);
  if (want != got) v.detail += " (published below cutoff: " + format_slopes(want) + ")";
  if (!(must_reach < s.certified_cutoff)) v.detail += " (cutoff does not reach " + to_string(must_reach) + ")";
  return v;
}

struct Runs {
  std::vector<CharSeries> all;  // every series built, for the floor ledger
  SlopeSequence run(int level, int k, u64 p, int m, SlopeOptions opt = {}) {
    opt.twists = {0, 1, 46};
    auto fx = FixtureSet::load(level);
    all.push_back(char_series_for_weight(level, k, p, m, fx, opt));
    return slopes(all.back());
  }
};

template <class F>
void criterion(int id, F&& body, int& failures) {
  auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("error: ") + e.what()};
  }
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(1);
  os << "criterion " << id << ": " << (v.pass ? "PASS" : "FAIL") << "  [" << sec << " s]  " << v.detail;
  std::cout << os.str() << std::endl;
  if (!v.pass) ++failures;
}

Verdict chow_heegner(const ChowHeegnerJob& job, const std::string& expected) {
  auto o = run_chowheegner(job, default_fixture_dir());
  const auto& r = o.report;
  Verdict v;
  v.pass = r.pass.value_or(false);
  std::string blind = r.blind ? r.blind->text() : std::string("none");
  v.detail = "p=" + std::to_string(job.p) + " m=" + std::to_string(job.m) + " " + job.f + "/" + job.g + ": expected " + expected + ", blind recognition " + blind +
             ", expected relation holds to " + std::to_string(r.achieved) + " of " + std::to_string(r.digits) + " digits";
  return v;
}

CurveModel curve(long a1, long a2, long a3, long a4, long a6, mpq_class x, mpq_class y) {
  CurveModel e;
  e.a = {a1, a2, a3, a4, a6};
  e.generator = CurvePoint::affine(std::move(x), std::move(y));
  return e;
}

/// Lower convex envelope at every integer, by brute force over all pairs.
std::vector<NewtonSegment> brute_hull(const std::vector<NewtonPoint>& pts) {
  std::vector<std::pair<std::int64_t, Rational>> fin;
  for (const auto& [i, v] : pts)
    if (v) fin.emplace_back(i, *v);
  std::int64_t lo = fin.front().first, hi = fin.front().first;
  for (const auto& [i, v] : fin) {
    lo = std::min(lo, i);
    hi = std::max(hi, i);
  }
  std::vector<Rational> env;
  for (std::int64_t x = lo; x <= hi; ++x) {
    std::optional<Rational> best;
    for (const auto& [i, vi] : fin)
      for (const auto& [j, vj] : fin) {
        if (i > x || j < x) continue;
        Rational y = (i == j) ? vi : vi + (vj - vi) * Rational(x - i, j - i);
        if (!best || y < *best) best = y;
      }
    env.push_back(*best);
  }
  std::vector<NewtonSegment> segs;
  for (std::size_t x = 0; x + 1 < env.size(); ++x) {
    Rational s = env[x + 1] - env[x];
    if (!segs.empty() && segs.back().slope == s) ++segs.back().width;
    else segs.push_back({s, 1});
  }
  return segs;
}

}  // namespace

int main() {
  int failures = 0;
  Runs runs;
  SlopeSequence s41_278, s41_8, s89, s53_14, s53_16, s61_14, s61_16;

  criterion(1, [&] {
    s41_278 = runs.run(41, 278, 3, 15);
    return against_published(s41_278, "0_12 1_14 3_48 6_14 7_22 8_6 9_22 10_14 12_48 14_14 16_22 17_6 18_22", Rational(10));
  }, failures);

  criterion(2, [&] {
    s89 = runs.run(89, 10, 2, 12);
    return against_published(s89, "0_16 1_22 2_22 14/5_5 3_1 4_68 9/2_4 6_1 31/5_5 7_22 8_22 9_30 10_22 21/2_16 12_52", Rational(6));
  }, failures);

  criterion(3, [&] {
    s53_14 = runs.run(53, 14, 2, 16);
    s61_14 = runs.run(61, 14, 2, 16);
    s53_16 = runs.run(53, 16, 2, 16);
    s61_16 = runs.run(61, 16, 2, 16);
    std::vector<Verdict> vs{
        against_published(s53_14, "0_10 1_13 2_23 4_13 6_59 9_13 11_23 12_13 13_18 14_13 29/2_10 16_18 17_13 18_23 21_13", Rational(0)),
        against_published(s61_14, "0_12 1_15 2_25 4_15 6_69 9_15 11_25 12_15 13_22 14_15 29/2_10 16_22 17_15 18_25 21_15", Rational(0)),
        against_published(s53_16, "0_10 1_13 3/2_10 3_31 17/3_3 6_1 7_67 15/2_2 9_1 28/3_3 12_31 27/2_10 14_13 15_18 16_13", Rational(8)),
        against_published(s61_16, "0_12 1_15 3/2_10 3_37 17/3_3 6_1 7_78 8_1 9_1 28/3_3 12_37 27/2_10 14_15 15_22 16_15", Rational(8))};
    auto d14 = compare_levels(s53_14, s61_14);
    auto d16 = compare_levels(s53_16, s61_16);
    Verdict v{true, ""};
    for (const auto& x : vs) {
      v.pass = v.pass && x.pass;
      v.detail += x.detail + "; ";
    }
    const bool pair = d16.only_first == std::vector<Rational>{Rational(15, 2)} && d16.only_second == std::vector<Rational>{Rational(8)};
    v.pass = v.pass && d14.empty(true) && pair;
    v.detail += "k=14 slope-set diff " + std::string(d14.empty(true) ? "empty" : "NONEMPTY") + ", k=16 deviation " + (pair ? "{15/2 | 8}" : "unexpected");
    return v;
  }, failures);

  criterion(4, [&] {
    s41_8 = runs.run(41, 8, 3, 15);
    auto r = compare_weights(s41_8, s41_278);
    Verdict v;
    v.pass = r.full_agreement && r.congruence_depth == 3;
    v.detail = "k=8 vs k=278 below " + to_string(r.compared_below) + ": " + (r.full_agreement ? "full agreement" : "disagree at " + to_string(*r.first_disagreement)) +
               ", 278 = 8 mod 3^" + std::to_string(r.congruence_depth.value_or(-1)) + "*2";
    return v;
  }, failures);

  criterion(5, [&] {
    std::size_t entry = 0, coeff = 0;
    for (const auto& cs : runs.all) {
      entry += cs.entry_floor_violations;
      coeff += cs.coefficient_floor_violations;
    }
    Verdict v;
    v.pass = !runs.all.empty() && entry == 0 && coeff == 0;
    v.detail = std::to_string(runs.all.size()) + " series (criteria 1-4, twists j in {0,1,46} per catalog): " + std::to_string(entry) +
               " entry-floor and " + std::to_string(coeff) + " coefficient-floor violations";
    return v;
  }, failures);

  criterion(6, [&] {
    SlopeOptions opt;
    opt.extra_blocks = 2;
    opt.extra_t = 200;
    auto big = slopes(char_series_for_weight(89, 10, 2, 12 + 5, FixtureSet::load(89), opt));
    std::vector<NewtonSegment> below;
    for (const auto& e : big.entries)
      if (e.slope < s89.certified_cutoff) below.push_back(e);
    Verdict v;
    v.pass = below == s89.entries && !s89.entries.empty();
    v.detail = "I+2, T+200, m+5 (cutoff " + to_string(big.certified_cutoff) + "): " + format_slopes(below) + " below " + to_string(s89.certified_cutoff);
    return v;
  }, failures);

  criterion(7, [&] {
    ChowHeegnerJob job{2, 30, curve(1, -1, 0, -1, 1, 0, 1), "58a", "58b", ExpectedRelation{mpq_class(3), std::nullopt}};
    return chow_heegner(job, "3");
  }, failures);

  criterion(8, [&] {
    ChowHeegnerJob job{2, 30, curve(0, 1, 0, -62893, -6091893, 20821, 3004216), "15104a", "118a", ExpectedRelation{mpq_class(6), std::nullopt}};
    return chow_heegner(job, "6");
  }, failures);

  criterion(9, [&] {
    ChowHeegnerJob job{3, 30, curve(0, 0, 1, 9, -10, 4, 9), "4617a", "19a",
                       ExpectedRelation{std::nullopt, std::array<mpz_class, 3>{2, 48, 729}}};
    return chow_heegner(job, "[2,48,729]");
  }, failures);

  criterion(10, [&] {
    std::mt19937_64 rng(2024);
    int comp_bad = 0, hull_bad = 0, hensel_bad = 0;
    // char_series of companion matrices
    for (int it = 0; it < 100; ++it) {
      const u64 p = it % 2 ? 3 : 2;
      ModMpz r(p, it % 2 ? 40 : 80);
      const std::size_t n = 1 + rng() % 12;
      Poly<ModMpz> f(n + 1);
      for (std::size_t i = 0; i < n; ++i) f[i] = r.mul_p_pow(r.from_mpz(mpz_class(static_cast<unsigned long>(rng()))), static_cast<int>(rng() % 5));
      f[n] = r.one();
      auto c = zero_matrix(r, n, n);
      for (std::size_t i = 1; i < n; ++i) c(i, i - 1) = r.one();
      for (std::size_t i = 0; i < n; ++i) c(i, n - 1) = r.neg(f[i]);
      auto cs = char_series(r, c);  // det(1 - tC) = sum f_{n-s} t^s
      bool ok = cs.size() == n + 1;
      for (std::size_t s = 0; ok && s <= n; ++s) ok = r.is_zero(r.sub(cs[s], f[n - s]));
      comp_bad += !ok;
    }
    // Newton polygons against the brute-force envelope
    for (int it = 0; it < 1000; ++it) {
      const std::size_t n = 1 + rng() % 12;
      std::vector<NewtonPoint> pts;
      for (std::size_t i = 0; i <= n; ++i) {
        std::optional<Rational> v;
        if (i == 0 || i == n || rng() % 5) v = Rational(static_cast<std::int64_t>(rng() % 40) - 5, 1 + static_cast<std::int64_t>(rng() % 3));
        pts.emplace_back(static_cast<std::int64_t>(i), v);
      }
      hull_bad += newton_polygon(pts).segments != brute_hull(pts);
    }
    // Hensel splitting: low * high reproduces the input, low carries the unit roots
    for (int it = 0; it < 200; ++it) {
      const u64 p = it % 3 == 0 ? 2 : (it % 3 == 1 ? 3 : 5);
      Mod64 r(p, p == 2 ? 40 : 20);
      const int d1 = 1 + static_cast<int>(rng() % 4), d2 = 1 + static_cast<int>(rng() % 4);
      Poly<Mod64> lo{r.from_int(static_cast<long long>(1 + rng() % (p - 1)) + static_cast<long long>(p * (rng() % 1000)))};
      for (int i = 1; i < d1; ++i) lo.push_back(r.from_int(static_cast<long long>(rng() % 100000)));
      lo.push_back(1);
      Poly<Mod64> hi;
      for (int i = 0; i < d2; ++i) hi.push_back(r.mul_p_pow(r.from_int(static_cast<long long>(rng() % 100000)), d2 - i));
      hi.push_back(1);
      auto f = poly_mul(r, lo, hi);
      auto [l, h] = hensel_split(r, f, Rational(1, 2));
      hensel_bad += !(poly_equal(r, poly_mul(r, l, h), f) && l.size() == lo.size());
    }
    Verdict v;
    v.pass = comp_bad == 0 && hull_bad == 0 && hensel_bad == 0;
    v.detail = "companion " + std::to_string(100 - comp_bad) + "/100, hull " + std::to_string(1000 - hull_bad) + "/1000, hensel " +
               std::to_string(200 - hensel_bad) + "/200";
    return v;
  }, failures);

  std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed")) << std::endl;
  return failures ? 1 : 0;
}
