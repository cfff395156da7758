#include "katz/upcompact/catalog.hpp"
#include "katz/upcompact/char_series.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace katz;

namespace {

std::vector<std::pair<std::string, std::int64_t>> flat(const std::vector<NewtonSegment>& s) {
  std::vector<std::pair<std::string, std::int64_t>> out;
  for (const auto& x : s) out.emplace_back(to_string(x.slope), x.width);
  return out;
}

// segments agreeing below a cutoff
std::vector<NewtonSegment> below(const std::vector<NewtonSegment>& s, const Rational& cut) {
  std::vector<NewtonSegment> out;
  for (const auto& x : s)
    if (x.slope < cut) out.push_back(x);
  return out;
}

}  // namespace

TEST(Upcompact, BlockCount) {
  EXPECT_EQ(block_count(2, 4, 30), 25);
  EXPECT_EQ(block_count(3, 3, 20), 16);
  // the displayed inequality at p = 5 first holds at I = 19 (see README)
  EXPECT_EQ(block_count(5, 1, 10), 19);
  EXPECT_THROW(block_count(5, 1, 0), std::invalid_argument);
}

TEST(Upcompact, SplitWeight) {
  auto c2 = EisensteinConfig::for_prime(2), c3 = EisensteinConfig::for_prime(3);
  auto a = split_weight(10, c2);
  EXPECT_EQ(a.k0, 2);
  EXPECT_EQ(a.j, 2);
  auto b = split_weight(278, c3);
  EXPECT_EQ(b.k0, 2);
  EXPECT_EQ(b.j, 46);
  auto c = split_weight(16, c2);
  EXPECT_EQ(c.k0, 4);
  EXPECT_EQ(c.j, 3);
  auto d = split_weight(-4, c2);
  EXPECT_EQ(d.k0, 4);
  EXPECT_EQ(d.j, -2);
  EXPECT_THROW(split_weight(1, c2), std::invalid_argument);
  EXPECT_THROW(split_weight(7, c2), std::invalid_argument);
}

TEST(Upcompact, LevelOneCatalog) {
  Mod64 r(2, 30);
  FixtureSet fx;
  SpaceBuilder<Mod64> sb(r, EisensteinConfig::for_prime(2), fx, 12);
  auto cat = build_catalog(sb, 0, 3);
  EXPECT_EQ(cat.block_dims(), (std::vector<int>{1, 0, 0, 1}));
  EXPECT_EQ(cat.pivots, (std::vector<std::size_t>{0, 1}));
  // the weight-12 row is Delta E4^{-3}
  auto d = series_mul(r, delta(r, cat.source_length()), series_pow(r, eisenstein(r, 4, cat.source_length()), -3));
  EXPECT_TRUE(series_equal(r, cat.rows[1], d));
  auto cm = up_matrix(cat, 0);
  EXPECT_TRUE(r.equal(cm.a(0, 0), r.from_int(2)));  // p U_p(1) = p
  EXPECT_TRUE(r.is_zero(cm.a(1, 0)));
  EXPECT_EQ(cm.floor_violations(), 0u);
}

TEST(Upcompact, CatalogInvariants) {
  auto fx = FixtureSet::load(41);
  Mod64 r(3, 20);
  auto cfg = EisensteinConfig::for_prime(3);
  SpaceBuilder<Mod64> sb(r, cfg, fx, 2 + 6 * 5);
  auto cat = build_catalog(sb, 2, 5);
  EXPECT_EQ(static_cast<std::int64_t>(cat.dim()), dimension(41, 2 + 6 * 5));
  std::set<std::size_t> a(cat.pivots.begin(), cat.pivots.end());
  auto top = sb.pivots(cat.top_weight());
  EXPECT_EQ(a, std::set<std::size_t>(top.begin(), top.end()));
  for (const auto& row : cat.rows) EXPECT_LT(leading_unit(r, row), row.size());
  // constant column at weight 0: p U_p(1) = p
  SpaceBuilder<Mod64> sb0(r, cfg, fx, 6 * 4);
  auto cat0 = build_catalog(sb0, 0, 4);
  auto cm0 = up_matrix(cat0, 0);
  EXPECT_TRUE(r.equal(cm0.a(0, 0), r.from_int(3)));
  for (std::size_t w = 1; w < cat0.dim(); ++w) EXPECT_TRUE(r.is_zero(cm0.a(w, 0)));
}

TEST(Upcompact, EntryFloorsAcrossTwists) {
  auto fx = FixtureSet::load(41);
  Mod64 r(3, 30);
  SpaceBuilder<Mod64> sb(r, EisensteinConfig::for_prime(3), fx, 2 + 6 * 8);
  auto cat = build_catalog(sb, 2, 8);
  for (int j : {0, 1, 7, 46, -3}) EXPECT_EQ(up_matrix(cat, j).floor_violations(), 0u) << j;
}

TEST(Upcompact, IncompleteCatalogIsDetected) {
  Mod64 r(2, 30);
  FixtureSet fx;
  SpaceBuilder<Mod64> sb(r, EisensteinConfig::for_prime(2), fx, 24);
  auto cat = build_catalog(sb, 0, 6);
  // perturb a row off the pivots: coordinates are unchanged, the residual is not
  auto idx = cat.pivots.back() + 3;
  cat.rows[1][idx] = r.add(cat.rows[1][idx], r.from_int(1));
  EXPECT_THROW(up_matrix(cat, 0), CatalogIncomplete);
}

TEST(Upcompact, CoefficientFloor) {
  std::vector<int> dims{1, 0, 1, 1};
  EXPECT_EQ(coefficient_floor(2, 4, dims, 2), Rational(8, 3) - Rational(4));
  EXPECT_EQ(coefficient_floor(2, 4, dims, 0), Rational(0));
  // a full block-0 set: only the constant terms
  std::vector<int> d2{5, 3};
  EXPECT_EQ(coefficient_floor(3, 3, d2, 5), Rational(-5) * (Rational(1) + Rational(2, 4)));
}

TEST(CharSeries, BuzzardCalegariLevelOne) {
  // p = 2, level 1, weight 0: slopes 0 and 1 + 2 v((3n)!/n!)
  FixtureSet fx;
  auto cs = char_series_for_weight(1, 0, 2, 20, fx);
  std::vector<std::pair<std::string, std::int64_t>> want{{"0", 1}, {"3", 1}, {"7", 1}, {"13", 1}, {"15", 1}, {"17", 1}};
  auto got = flat(cs.certified);
  ASSERT_GE(got.size(), 4u);
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i], want[i]) << i;
  EXPECT_EQ(cs.coefficient_floor_violations, 0u);
  EXPECT_EQ(cs.entry_floor_violations, 0u);
}

TEST(CharSeries, DeltaSlopes) {
  // classical slopes at weight 12: v(tau(5)) = v(tau(7)) = 1
  FixtureSet fx;
  for (u64 p : {5, 7}) {
    auto cs = char_series_for_weight(1, 12, p, 15, fx);
    auto got = flat(cs.certified);
    ASSERT_GE(got.size(), 2u);
    EXPECT_EQ(got[0], (std::pair<std::string, std::int64_t>{"0", 1}));
    EXPECT_EQ(got[1], (std::pair<std::string, std::int64_t>{"1", 1}));
    EXPECT_TRUE(cs.coeffs[0] == 1);
  }
}

TEST(CharSeries, ProvenPrefixOfReadout) {
  auto fx = FixtureSet::load(19);
  auto cs = char_series_for_weight(19, 8, 3, 10, fx);
  EXPECT_LE(cs.proven_cutoff, cs.certified_cutoff);
  auto pr = flat(cs.proven), rd = flat(cs.certified);
  ASSERT_LE(pr.size(), rd.size());
  // proven slopes form a prefix; the last may be cut short only by the cutoff
  for (std::size_t i = 0; i + 1 < pr.size(); ++i) EXPECT_EQ(pr[i], rd[i]);
}

TEST(CharSeries, StabilityAndTwistCoherence) {
  auto fx = FixtureSet::load(19);
  const int k = 20, m = 10;
  auto base = char_series_for_weight(19, k, 3, m, fx);
  SlopeOptions more_blocks;
  more_blocks.extra_blocks = 2;
  SlopeOptions more_t;
  more_t.extra_t = 200;
  SlopeOptions twisted;
  twisted.base_weight = 8;
  for (const auto& cs : {char_series_for_weight(19, k, 3, m, fx, more_blocks), char_series_for_weight(19, k, 3, m, fx, more_t),
                         char_series_for_weight(19, k, 3, m + 5, fx), char_series_for_weight(19, k, 3, m, fx, twisted)}) {
    auto cut = std::min(cs.certified_cutoff, base.certified_cutoff);
    EXPECT_EQ(below(cs.certified, cut), below(base.certified, cut));
  }
  EXPECT_FALSE(base.certified.empty());
}

TEST(CharSeries, RejectsBadInput) {
  FixtureSet fx;
  EXPECT_THROW(char_series_for_weight(1, 3, 2, 10, fx), std::invalid_argument);
  EXPECT_THROW(char_series_for_weight(1, 1, 2, 10, fx), std::invalid_argument);
  EXPECT_THROW(char_series_for_weight(1, 4, 4, 10, fx), std::invalid_argument);
  EXPECT_THROW(char_series_for_weight(1, 4, 2, 0, fx), std::invalid_argument);
  EXPECT_THROW(FixtureSet::load(97), MissingFixture);
}
