#include "katz/slopes/slope_analysis.hpp"

#include <gtest/gtest.h>

using namespace katz;

namespace {

SlopeSequence seq(int level, int k, std::vector<NewtonSegment> e, Rational cut = Rational(15), u64 p = 2) {
  SlopeSequence s;
  s.p = p;
  s.level = level;
  s.weight = k;
  s.certified_cutoff = cut;
  s.entries = normalize_slopes(std::move(e), cut);
  return s;
}

}  // namespace

TEST(Slopes, NormalizeMergesAndTruncates) {
  auto v = normalize_slopes({{Rational(3), 2}, {Rational(0), 1}, {Rational(3), 1}, {Rational(20), 4}}, Rational(10));
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[1], (NewtonSegment{Rational(3), 3}));
  EXPECT_EQ(format_slopes(v), "0_1 3_3");
  EXPECT_THROW(normalize_slopes({{Rational(1), 0}}, Rational(5)), std::invalid_argument);
}

TEST(Slopes, TrivialSeriesHasNoSlopes) {
  CharSeries cs;
  cs.p = 2;
  cs.coeffs = {1};
  cs.certified_cutoff = Rational(9);
  auto s = slopes(cs);
  EXPECT_TRUE(s.entries.empty());
  EXPECT_EQ(to_csv(s), "slope,multiplicity\n");
}

TEST(Slopes, CongruenceDepth) {
  EXPECT_EQ(congruence_depth(3, 8, 278), 3);  // 270 = 2 * 27 * 5
  EXPECT_EQ(congruence_depth(2, 14, 16), 1);
  EXPECT_EQ(congruence_depth(3, 8, 9), -1);
  EXPECT_FALSE(congruence_depth(5, 12, 12).has_value());
}

TEST(Slopes, CompareWeights) {
  auto a = seq(41, 8, {{Rational(0), 12}, {Rational(1), 14}, {Rational(3), 48}}, Rational(12), 3);
  auto b = seq(41, 278, {{Rational(0), 12}, {Rational(1), 14}, {Rational(3), 48}}, Rational(13), 3);
  auto r = compare_weights(a, b);
  EXPECT_TRUE(r.full_agreement);
  EXPECT_EQ(r.alpha_max, Rational(12));
  EXPECT_EQ(r.congruence_depth, 3);

  auto c = seq(41, 8, {{Rational(0), 11}, {Rational(1), 14}}, Rational(12), 3);
  auto d = compare_weights(c, b);
  EXPECT_FALSE(d.full_agreement);
  EXPECT_EQ(d.first_disagreement, Rational(0));
  EXPECT_FALSE(d.alpha_max.has_value());  // disagree at 0

  // symmetry
  auto e = compare_weights(b, c);
  EXPECT_EQ(e.alpha_max, d.alpha_max);
  ASSERT_EQ(e.diffs.size(), d.diffs.size());
  for (std::size_t i = 0; i < e.diffs.size(); ++i) {
    EXPECT_EQ(e.diffs[i].first, d.diffs[i].second);
    EXPECT_EQ(e.diffs[i].second, d.diffs[i].first);
  }
  EXPECT_THROW(compare_weights(a, seq(43, 8, {})), std::invalid_argument);
}

TEST(Slopes, CompareLevels) {
  auto r53 = seq(53, 16, {{0, 10}, {1, 13}, {Rational(3, 2), 10}, {3, 31}, {Rational(17, 3), 3}, {6, 1}, {7, 67}, {Rational(15, 2), 2}, {9, 1}, {Rational(28, 3), 3}});
  auto r61 = seq(61, 16, {{0, 12}, {1, 15}, {Rational(3, 2), 10}, {3, 37}, {Rational(17, 3), 3}, {6, 1}, {7, 78}, {8, 1}, {9, 1}, {Rational(28, 3), 3}});
  auto d = compare_levels(r53, r61);
  EXPECT_EQ(d.only_first, std::vector<Rational>{Rational(15, 2)});
  EXPECT_EQ(d.only_second, std::vector<Rational>{Rational(8)});
  EXPECT_TRUE(d.multiplicity_deltas.empty());
  EXPECT_EQ(compare_levels(r53, r61, false).multiplicity_deltas.size(), 4u);
  EXPECT_TRUE(compare_levels(r53, r53, false).empty(false));
  EXPECT_THROW(compare_levels(r53, seq(61, 14, {})), std::invalid_argument);
}

TEST(Slopes, RealRunRespectsInvariants) {
  auto fx = FixtureSet::load(29);
  auto s = slopes(char_series_for_weight(29, 2, 2, 10, fx));
  EXPECT_LE(static_cast<std::size_t>(s.total_multiplicity()), s.dim);
  for (std::size_t i = 1; i < s.entries.size(); ++i) EXPECT_LT(s.entries[i - 1].slope, s.entries[i].slope);
  for (const auto& e : s.entries) EXPECT_LT(e.slope, s.certified_cutoff);
  ASSERT_FALSE(s.entries.empty());
  EXPECT_EQ(s.entries[0].slope, Rational(0));
  EXPECT_FALSE(s.provenance.empty());
}
