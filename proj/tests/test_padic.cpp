#include "katz/padic/charpoly.hpp"
#include "katz/padic/newton.hpp"
#include "katz/padic/poly.hpp"
#include "katz/padic/ring.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace katz;

namespace {

template <class R>
Matrix<R> random_matrix(const R& ring, std::size_t n, std::mt19937_64& rng) {
  auto m = zero_matrix(ring, n, n);
  for (auto& x : m.a) x = ring.from_int(static_cast<long long>(rng() >> 2));
  return m;
}

// det(1 - tA) by cofactor expansion over polynomial entries
template <class R>
Poly<R> det_poly(const R& ring, const std::vector<std::vector<Poly<R>>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return {ring.one()};
  Poly<R> out;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<Poly<R>>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<Poly<R>> row;
      for (std::size_t c = 0; c < n; ++c)
        if (c != j) row.push_back(m[i][c]);
      minor.push_back(row);
    }
    auto term = poly_mul(ring, m[0][j], det_poly(ring, minor));
    out = (j % 2 == 0) ? poly_add(ring, out, term) : poly_sub(ring, out, term);
  }
  return out;
}

template <class R>
std::vector<typename R::value_type> cofactor_char_series(const R& ring, const Matrix<R>& a) {
  std::vector<std::vector<Poly<R>>> m(a.rows, std::vector<Poly<R>>(a.rows));
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.rows; ++j) {
      Poly<R> e{i == j ? ring.one() : ring.zero(), ring.neg(a(i, j))};
      poly_trim(ring, e);
      m[i][j] = e;
    }
  auto d = det_poly(ring, m);
  d.resize(a.rows + 1, ring.zero());
  return d;
}

}  // namespace

TEST(Ring, Mod64Basics) {
  Mod64 r(3, 10);
  EXPECT_EQ(r.modulus(), 59049u);
  auto x = r.from_int(-1);
  EXPECT_EQ(x, 59048u);
  EXPECT_EQ(r.mul(r.inverse(2), 2), 1u);
  EXPECT_EQ(r.valuation(r.from_int(18)), 2);
  EXPECT_EQ(r.exact_div_p(r.from_int(18), 2), 2u);
  Mod64 b(2, 30);
  EXPECT_EQ(b.mul(b.inverse(3), 3), 1u);
}

TEST(Ring, BackendsAgree) {
  std::mt19937_64 rng(1);
  for (u64 p : {2ull, 3ull, 5ull}) {
    Mod64 a(p, 20);
    Mod128 b(p, 20);
    ModMpz c(p, 20);
    for (int it = 0; it < 500; ++it) {
      long long x = static_cast<long long>(rng() >> 3), y = static_cast<long long>(rng() >> 3);
      auto ab = a.mul(a.from_int(x), a.from_int(y));
      auto bb = b.mul(b.from_int(x), b.from_int(y));
      auto cb = c.mul(c.from_int(x), c.from_int(y));
      EXPECT_EQ(a.to_mpz(ab), b.to_mpz(bb));
      EXPECT_EQ(a.to_mpz(ab), cb);
    }
  }
}

TEST(Ring, Mod128Wide) {
  std::mt19937_64 rng(2);
  for (u64 p : {2ull, 3ull, 7ull}) {
    int digits = p == 2 ? 120 : (p == 3 ? 75 : 42);
    Mod128 b(p, digits);
    ModMpz c(p, digits);
    for (int it = 0; it < 300; ++it) {
      mpz_class x = mpz_class(static_cast<unsigned long>(rng())) * mpz_class(static_cast<unsigned long>(rng()));
      mpz_class y = mpz_class(static_cast<unsigned long>(rng())) * mpz_class(static_cast<unsigned long>(rng()));
      EXPECT_EQ(b.to_mpz(b.mul(b.from_mpz(x), b.from_mpz(y))), c.mul(c.from_mpz(x), c.from_mpz(y)));
      auto acc = b.acc_zero();
      auto acc2 = c.acc_zero();
      for (int k = 0; k < 20; ++k) {
        b.fma(acc, b.from_mpz(x + k), b.from_mpz(y));
        c.fma(acc2, c.from_mpz(x + k), c.from_mpz(y));
      }
      EXPECT_EQ(b.to_mpz(b.reduce(acc)), c.reduce(acc2));
      if (x % p != 0) EXPECT_EQ(b.to_mpz(b.mul(b.inverse(b.from_mpz(x)), b.from_mpz(x))), 1);
    }
  }
}

TEST(Newton, Examples) {
  auto np = newton_polygon({{0, Rational(0)}, {1, Rational(1)}, {2, Rational(3)}});
  ASSERT_EQ(np.segments.size(), 2u);
  EXPECT_EQ(np.segments[0], (NewtonSegment{Rational(1), 1}));
  EXPECT_EQ(np.segments[1], (NewtonSegment{Rational(2), 1}));
  auto np2 = newton_polygon({{0, Rational(0)}, {1, Rational(5)}, {3, Rational(12)}, {5, Rational(14)}});
  ASSERT_EQ(np2.segments.size(), 1u);
  EXPECT_EQ(np2.segments[0], (NewtonSegment{Rational(14, 5), 5}));
  auto np3 = newton_polygon({{0, Rational(0)}, {1, Rational(0)}, {2, Rational(0)}});
  ASSERT_EQ(np3.segments.size(), 1u);
  EXPECT_EQ(np3.segments[0], (NewtonSegment{Rational(0), 2}));
  EXPECT_THROW(newton_polygon({}), std::invalid_argument);
  auto np4 = newton_polygon({{0, Rational(0)}, {1, std::nullopt}});
  EXPECT_TRUE(np4.segments.empty());
}

TEST(Poly, HenselSplitExamples) {
  Mod64 r(2, 10);
  auto f = poly_from_ints(r, {2, -3, 1});
  auto [low, high] = hensel_split(r, f, Rational(1, 2));
  EXPECT_TRUE(poly_equal(r, low, poly_from_ints(r, {-1, 1})));
  EXPECT_TRUE(poly_equal(r, high, poly_from_ints(r, {-2, 1})));

  // x^2 - a x + p: the unit root is congruent to a mod p
  Mod64 r5(5, 12);
  auto g = poly_from_ints(r5, {5, -7, 1});
  auto [l5, h5] = hensel_split(r5, g, Rational(1, 2));
  ASSERT_EQ(l5.size(), 2u);
  auto alpha = r5.neg(l5[0]);
  EXPECT_EQ(alpha % 5, 2u);
  EXPECT_EQ(poly_eval(r5, g, alpha), 0u);

  auto allpos = poly_from_ints(r, {4, 2, 1});  // roots of valuation 1
  auto [l2, h2] = hensel_split(r, allpos, Rational(1, 2));
  EXPECT_TRUE(poly_equal(r, l2, Poly<Mod64>{1}));
  EXPECT_TRUE(poly_equal(r, h2, allpos));

  EXPECT_THROW(hensel_split(r, poly_from_ints(r, {2, -3, 1}), Rational(1)), std::domain_error);
}

TEST(Poly, CrtProjectorExamples) {
  Mod64 r(2, 10);
  auto low = poly_from_ints(r, {-1, 1}), high = poly_from_ints(r, {-2, 1});
  auto full = poly_mul(r, low, high);
  auto b = crt_projector(r, low, high, full);
  EXPECT_TRUE(poly_equal(r, b, poly_from_ints(r, {2, -1})));
  EXPECT_EQ(poly_eval(r, b, r.from_int(1)), 1u);
  EXPECT_EQ(poly_eval(r, b, r.from_int(2)), 0u);
  EXPECT_TRUE(crt_projector(r, Poly<Mod64>{1}, full, full).empty());
}

TEST(Poly, ProjectorOnConjugatedDiagonal) {
  Mod64 r(3, 20);
  std::mt19937_64 rng(7);
  // diagonal with two unit eigenvalues, conjugated by a random unimodular matrix
  auto d = zero_matrix(r, 6, 6);
  long long diag[6] = {1, 2, 3, 9, 6, 27};
  for (int i = 0; i < 6; ++i) d(i, i) = r.from_int(diag[i]);
  Matrix<Mod64> u;
  for (;;) {
    u = random_matrix(r, 6, rng);
    try { (void)mat_inverse(r, u); break; } catch (const std::domain_error&) {}
  }
  auto a = mat_mul(r, mat_mul(r, u, d), mat_inverse(r, u));
  auto chi = charpoly(r, a);
  auto [low, high] = hensel_split(r, chi, Rational(1, 2));
  EXPECT_EQ(low.size(), 3u);
  auto b = crt_projector(r, low, high, chi);
  auto pm = poly_matrix(r, b, a);
  EXPECT_TRUE(mat_equal(r, mat_mul(r, pm, pm), pm));
  EXPECT_TRUE(mat_equal(r, mat_mul(r, pm, a), mat_mul(r, a, pm)));
  EXPECT_EQ(rank_mod_p(r, pm), 2u);
}

TEST(Poly, HenselProductIdentityRandom) {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 200; ++it) {
    u64 p = (it % 3 == 0) ? 2 : (it % 3 == 1 ? 3 : 5);
    Mod64 r(p, p == 2 ? 40 : 20);
    // product of a random unit-root part and a part with all roots divisible by p
    int d1 = 1 + static_cast<int>(rng() % 4), d2 = 1 + static_cast<int>(rng() % 4);
    Poly<Mod64> lo{r.from_int(static_cast<long long>(1 + rng() % (p - 1)) + static_cast<long long>(p * (rng() % 1000)))};
    for (int i = 1; i < d1; ++i) lo.push_back(r.from_int(static_cast<long long>(rng() % 100000)));
    lo.push_back(1);
    Poly<Mod64> hi;
    for (int i = 0; i < d2; ++i) hi.push_back(r.mul_p_pow(r.from_int(static_cast<long long>(rng() % 100000)), d2 - i));
    hi.push_back(1);
    auto f = poly_mul(r, lo, hi);
    auto [l, h] = hensel_split(r, f, Rational(1, 2));
    EXPECT_TRUE(poly_equal(r, poly_mul(r, l, h), f));
    EXPECT_EQ(l.size(), lo.size());
  }
}

TEST(CharSeries, Trivial) {
  Mod64 r(2, 10);
  auto a = zero_matrix(r, 2, 2);
  a(0, 0) = 1;
  a(1, 1) = 2;
  auto c = char_series(r, a);
  EXPECT_EQ(c, (std::vector<u64>{1, r.from_int(-3), 2}));
  auto z = zero_matrix(r, 2, 2);
  EXPECT_EQ(char_series(r, z), (std::vector<u64>{1, 0, 0}));
}

TEST(CharSeries, CofactorOracle) {
  Mod64 r(3, 15);
  std::mt19937_64 rng(5);
  for (int it = 0; it < 20; ++it) {
    auto a = random_matrix(r, 5, rng);
    auto want = cofactor_char_series(r, a);
    EXPECT_EQ(char_series(r, a), want);
    EXPECT_EQ(char_series_from_charpoly(r, charpoly_berkowitz(r, a), 5), want);
  }
}

TEST(CharSeries, HessenbergMatchesBerkowitzOnValuedMatrices) {
  std::mt19937_64 rng(9);
  for (u64 p : {2ull, 3ull}) {
    ModMpz r(p, 60);
    for (int it = 0; it < 10; ++it) {
      std::size_t n = 12;
      auto a = zero_matrix(r, n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          a(i, j) = r.mul_p_pow(r.from_int(static_cast<long long>(rng() >> 4)), static_cast<int>((i * 3 + rng() % 3) / 2));
      EXPECT_TRUE(poly_equal(r, charpoly(r, a), charpoly_berkowitz(r, a)));
    }
  }
}

TEST(CharSeries, CompanionReproducesPolynomial) {
  std::mt19937_64 rng(3);
  for (int it = 0; it < 100; ++it) {
    Mod128 r(it % 2 ? 3 : 2, it % 2 ? 40 : 100);
    std::size_t n = 2 + rng() % 10;
    Poly<Mod128> f(n + 1);
    for (std::size_t i = 0; i < n; ++i) f[i] = r.from_mpz(mpz_class(static_cast<unsigned long>(rng())) * static_cast<unsigned long>(rng()));
    f[n] = 1;
    auto c = zero_matrix(r, n, n);
    for (std::size_t i = 1; i < n; ++i) c(i, i - 1) = 1;
    for (std::size_t i = 0; i < n; ++i) c(i, n - 1) = r.neg(f[i]);
    EXPECT_TRUE(poly_equal(r, charpoly(r, c), f));
  }
}

TEST(Matrix, ElementaryDivisors) {
  Mod64 r(2, 10);
  auto a = zero_matrix(r, 3, 3);
  a(0, 0) = 4; a(1, 1) = 2; a(2, 2) = 0; a(0, 1) = 2;
  auto v = elementary_divisor_valuations(r, a);
  EXPECT_EQ(v, (std::vector<int>{1, 2, 10}));
}
