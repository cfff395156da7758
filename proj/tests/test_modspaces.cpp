#include "katz/modspaces/dimension.hpp"
#include "katz/modspaces/fixtures.hpp"
#include "katz/modspaces/spaces.hpp"

#include <gtest/gtest.h>

using namespace katz;

TEST(Dimension, KnownValues) {
  EXPECT_EQ(dimension(1, 0), 1);
  EXPECT_EQ(dimension(1, 2), 0);
  EXPECT_EQ(dimension(1, 4), 1);
  EXPECT_EQ(dimension(1, 12), 2);
  EXPECT_EQ(dimension(1, 14), 1);
  EXPECT_EQ(dimension(1, 24), 3);
  EXPECT_EQ(cusp_dimension(1, 12), 1);
  EXPECT_EQ(dimension(11, 2), 2);
  EXPECT_EQ(cusp_dimension(11, 2), 1);
  EXPECT_EQ(cusp_dimension(37, 2), 2);
  EXPECT_EQ(cusp_dimension(389, 2), 32);
  EXPECT_EQ(dimension(4, 2), 2);
  EXPECT_EQ(dimension(9, 2), 3);
  EXPECT_EQ(dimension(89, 10), 68);
  EXPECT_EQ(dimension(5, 3), 0);
  EXPECT_THROW(dimension(5, 1), std::invalid_argument);
  EXPECT_EQ(sturm_bound(1, 12), 2);
}

TEST(Dimension, MatchesFixtureHeaders) {
  for (int n : {19, 29, 41, 53, 59, 61, 89}) {
    auto fs = FixtureSet::load(n);
    for (int k : {2, 4}) {
      ASSERT_NE(fs.find(k), nullptr);
      EXPECT_EQ(static_cast<std::int64_t>(fs.find(k)->rows.size()), dimension(n, k)) << n << " " << k;
    }
  }
}

TEST(Fixtures, MissingFileIsReported) {
  try {
    FixtureSet::load(97);
    FAIL();
  } catch (const MissingFixture& e) {
    EXPECT_NE(std::string(e.what()).find("supply a fixture for this weight"), std::string::npos);
  }
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Spaces, LevelOneBasis) {
  Mod64 r(5, 10);
  auto b = level1_basis(r, 24, 40);
  EXPECT_EQ(b.dim(), 3u);
  EXPECT_EQ(b.pivots, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Spaces, BuilderReachesDimension) {
  for (u64 p : {2, 3, 5}) {
    for (int n : {1, 19, 41}) {
      auto fs = FixtureSet::load(n);
      Mod64 r(p, 8);
      auto cfg = EisensteinConfig::for_prime(p);
      SpaceBuilder<Mod64> sb(r, cfg, fs, 40);
      for (int k = 0; k <= 40; k += 2) {
        EXPECT_EQ(static_cast<std::int64_t>(sb.pivots(k).size()), dimension(n, k)) << p << " " << n << " " << k;
        if (k >= cfg.weight) {
          // chain: pivots of M_{k-w} are contained in those of M_k
          auto lo = sb.pivots(k - cfg.weight), hi = sb.pivots(k);
          EXPECT_TRUE(std::includes(hi.begin(), hi.end(), lo.begin(), lo.end()));
        }
      }
    }
  }
}

TEST(Spaces, BasisAgreesWithFixtureAndHecke) {
  // the built weight-2 space equals the fixture span; weight-6 space is Hecke stable
  const int n = 19;
  auto fs = FixtureSet::load(n);
  Mod64 r(3, 12);
  SpaceBuilder<Mod64> sb(r, EisensteinConfig::for_prime(3), fs, 10);
  auto b6 = sb.basis(6, 600);
  EXPECT_EQ(static_cast<std::int64_t>(b6.dim()), dimension(n, 6));
  for (const auto& row : b6.rows) {
    auto t5 = hecke_T(r, row, 5, 6, n);
    // express T5 f through the pivots and compare everywhere
    Series<Mod64> rec(t5.size(), r.zero());
    for (std::size_t i = 0; i < b6.dim(); ++i) {
      auto c = t5[b6.pivots[i]];
      for (std::size_t j = 0; j < rec.size(); ++j) rec[j] = r.add(rec[j], r.mul(c, b6.rows[i][j]));
    }
    EXPECT_TRUE(series_equal(r, rec, t5));
  }
}

TEST(Spaces, ComplementBlocks) {
  auto fs = FixtureSet::load(41);
  Mod64 r(2, 10);
  SpaceBuilder<Mod64> sb(r, EisensteinConfig::for_prime(2), fs, 2 + 4 * 6);
  auto blocks = complement_blocks(sb, 2, 6, 200);
  std::int64_t total = 0;
  for (const auto& b : blocks) total += static_cast<std::int64_t>(b.dim());
  EXPECT_EQ(total, dimension(41, 2 + 4 * 6));
}
