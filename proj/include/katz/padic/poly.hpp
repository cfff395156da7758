#pragma once

#include "katz/padic/matrix.hpp"
#include "katz/padic/newton.hpp"
#include "katz/padic/ring.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace katz {

/// Polynomial over R, coefficients low degree first.
template <class R>
using Poly = std::vector<typename R::value_type>;

template <class R>
void poly_trim(const R& ring, Poly<R>& a) {
  while (!a.empty() && ring.is_zero(a.back())) a.pop_back();
}

template <class R>
Poly<R> poly_from_ints(const R& ring, const std::vector<long long>& c) {
  Poly<R> out;
  for (long long x : c) out.push_back(ring.from_int(x));
  poly_trim(ring, out);
  return out;
}

template <class R>
Poly<R> poly_add(const R& ring, const Poly<R>& a, const Poly<R>& b) {
  Poly<R> out(std::max(a.size(), b.size()), ring.zero());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = ring.add(out[i], b[i]);
  poly_trim(ring, out);
  return out;
}

template <class R>
Poly<R> poly_sub(const R& ring, const Poly<R>& a, const Poly<R>& b) {
  Poly<R> out(std::max(a.size(), b.size()), ring.zero());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = ring.sub(out[i], b[i]);
  poly_trim(ring, out);
  return out;
}

template <class R>
Poly<R> poly_mul(const R& ring, const Poly<R>& a, const Poly<R>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<typename R::Acc> acc(a.size() + b.size() - 1, ring.acc_zero());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) ring.fma(acc[i + j], a[i], b[j]);
  Poly<R> out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = ring.reduce(acc[i]);
  poly_trim(ring, out);
  return out;
}

/// Division by a polynomial whose leading coefficient is a unit.
template <class R>
std::pair<Poly<R>, Poly<R>> poly_divmod(const R& ring, Poly<R> a, Poly<R> b) {
  poly_trim(ring, b);
  poly_trim(ring, a);
  if (b.empty()) throw std::domain_error("poly_divmod: division by zero");
  if (ring.valuation(b.back()) != 0) throw std::domain_error("poly_divmod: leading coefficient not a unit");
  auto inv = ring.inverse(b.back());
  if (a.size() < b.size()) return {Poly<R>{}, a};
  Poly<R> q(a.size() - b.size() + 1, ring.zero());
  for (std::size_t top = a.size(); top >= b.size(); --top) {
    const std::size_t shift = top - b.size();
    auto c = ring.mul(a[top - 1], inv);
    q[shift] = c;
    if (ring.is_zero(c)) continue;
    for (std::size_t j = 0; j < b.size(); ++j) a[shift + j] = ring.sub(a[shift + j], ring.mul(c, b[j]));
  }
  a.resize(b.size() - 1);
  poly_trim(ring, a);
  poly_trim(ring, q);
  return {q, a};
}

template <class R>
Poly<R> poly_mod(const R& ring, const Poly<R>& a, const Poly<R>& b) {
  return poly_divmod(ring, a, b).second;
}

template <class R>
typename R::value_type poly_eval(const R& ring, const Poly<R>& a, const typename R::value_type& x) {
  auto r = ring.zero();
  for (std::size_t i = a.size(); i-- > 0;) r = ring.add(ring.mul(r, x), a[i]);
  return r;
}

template <class R>
bool poly_equal(const R& ring, Poly<R> a, Poly<R> b) {
  poly_trim(ring, a);
  poly_trim(ring, b);
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!ring.equal(a[i], b[i])) return false;
  return true;
}

/// Valuations of the roots, as the Newton polygon of the reversed polynomial.
template <class R>
NewtonPolygon root_polygon(const R& ring, const Poly<R>& a) {
  std::vector<NewtonPoint> pts;
  const std::size_t d = a.size() - 1;
  for (std::size_t i = 0; i <= d; ++i) {
    const auto& c = a[d - i];
    if (ring.is_zero(c)) pts.emplace_back(static_cast<std::int64_t>(i), std::nullopt);
    else pts.emplace_back(static_cast<std::int64_t>(i), Rational(ring.valuation(c)));
  }
  return newton_polygon(pts);
}

namespace detail {

/// s*g + t*h = 1 over F_p (ring with one digit); empty optional when not coprime.
template <class R>
bool bezout_mod_p(const R& fp, Poly<R> g, Poly<R> h, Poly<R>& s, Poly<R>& t) {
  poly_trim(fp, g);
  poly_trim(fp, h);
  Poly<R> r0 = g, r1 = h;
  Poly<R> s0{fp.one()}, s1{}, t0{}, t1{fp.one()};
  while (!r1.empty()) {
    auto [q, r] = poly_divmod(fp, r0, r1);
    r0 = std::move(r1);
    r1 = std::move(r);
    auto s2 = poly_sub(fp, s0, poly_mul(fp, q, s1));
    auto t2 = poly_sub(fp, t0, poly_mul(fp, q, t1));
    s0 = std::move(s1); s1 = std::move(s2);
    t0 = std::move(t1); t1 = std::move(t2);
  }
  if (r0.size() != 1) return false;
  auto inv = fp.inverse(r0[0]);
  for (auto& c : s0) c = fp.mul(c, inv);
  for (auto& c : t0) c = fp.mul(c, inv);
  s = s0;
  t = t0;
  return true;
}

template <class R>
Poly<R> reduce_to(const R& dst, const R& src, const Poly<R>& a) {
  Poly<R> out;
  for (const auto& c : a) out.push_back(dst.from_mpz(src.to_mpz(c)));
  poly_trim(dst, out);
  return out;
}

inline int newton_steps(int digits) {
  int s = 0;
  for (int prec = 1; prec < digits; prec *= 2) ++s;
  return s + 1;
}

}  // namespace detail

/// Bezout pair (s, t) with s*g + t*h = 1 mod p^k; h monic. Seeded mod p and
/// lifted by Newton iteration.
template <class R>
std::pair<Poly<R>, Poly<R>> bezout(const R& ring, const Poly<R>& g, const Poly<R>& h) {
  R fp(ring.p(), 1);
  Poly<R> s0, t0;
  if (!detail::bezout_mod_p(fp, detail::reduce_to(fp, ring, g), detail::reduce_to(fp, ring, h), s0, t0))
    throw std::domain_error("resultant is not a p-adic unit (factors not coprime mod p)");
  Poly<R> s = detail::reduce_to(ring, fp, s0), t = detail::reduce_to(ring, fp, t0);
  const Poly<R> one{ring.one()};
  for (int it = 0; it < detail::newton_steps(ring.digits()); ++it) {
    // e = 1 - s g - t h;  s += s e mod h;  t recomputed from the identity
    auto e = poly_sub(ring, one, poly_add(ring, poly_mul(ring, s, g), poly_mul(ring, t, h)));
    if (e.empty()) break;
    auto se = poly_mul(ring, s, e);
    auto [q, r] = poly_divmod(ring, se, h);
    s = poly_add(ring, s, r);
    t = poly_add(ring, t, poly_add(ring, poly_mul(ring, t, e), poly_mul(ring, q, g)));
  }
  return {s, t};
}

template <class R>
struct HenselSplit {
  Poly<R> low;   ///< monic, roots of valuation < cut
  Poly<R> high;  ///< roots of valuation > cut
  Poly<R> s, t;  ///< s*high + t*low = 1
};

/// Factor a (unit leading coefficient) as low*high, low carrying the roots of
/// valuation below `cut`. Only splits separating the unit roots are coprime
/// mod p; anything else is rejected.
template <class R>
HenselSplit<R> hensel_split_full(const R& ring, Poly<R> a, const Rational& cut) {
  poly_trim(ring, a);
  if (a.empty()) throw std::invalid_argument("hensel_split: zero polynomial");
  if (ring.valuation(a.back()) != 0) throw std::invalid_argument("hensel_split: leading coefficient not a unit");
  const std::size_t d = a.size() - 1;
  auto np = root_polygon(ring, a);
  std::int64_t s0 = 0;
  for (const auto& seg : np.segments) {
    if (seg.slope == cut) throw std::domain_error("hensel_split: ambiguous split, a slope equals the cut");
    if (seg.slope < cut) s0 += seg.width;
  }
  for (const auto& seg : np.segments)
    if (seg.slope < cut && seg.slope != Rational(0))
      throw std::domain_error("hensel_split: low part not coprime to high part mod p");
  if (s0 > 0 && cut <= Rational(0)) throw std::domain_error("hensel_split: cut must be positive");

  auto lead_inv = ring.inverse(a.back());
  for (auto& c : a) c = ring.mul(c, lead_inv);

  const std::size_t e = d - static_cast<std::size_t>(s0);
  Poly<R> low(a.begin() + static_cast<std::ptrdiff_t>(e), a.end());
  Poly<R> high(e + 1, ring.zero());
  high[e] = ring.one();
  HenselSplit<R> out;
  if (s0 == 0) {
    out.low = {ring.one()};
    out.high = a;
    out.s = {};
    out.t = {ring.one()};
  } else {
    // quadratic Hensel lifting (von zur Gathen-Gerhard), low is kept monic
    auto [s, t] = bezout(ring, high, low);
    for (int it = 0; it < detail::newton_steps(ring.digits()) + 1; ++it) {
      auto err = poly_sub(ring, a, poly_mul(ring, high, low));
      if (err.empty()) break;
      auto [q, r] = poly_divmod(ring, poly_mul(ring, s, err), low);
      high = poly_add(ring, high, poly_add(ring, poly_mul(ring, t, err), poly_mul(ring, q, high)));
      low = poly_add(ring, low, r);
      auto b = poly_sub(ring, poly_add(ring, poly_mul(ring, s, high), poly_mul(ring, t, low)), Poly<R>{ring.one()});
      auto [c, dd] = poly_divmod(ring, poly_mul(ring, s, b), low);
      s = poly_sub(ring, s, dd);
      t = poly_sub(ring, t, poly_add(ring, poly_mul(ring, t, b), poly_mul(ring, c, high)));
    }
    if (!poly_equal(ring, poly_mul(ring, high, low), a)) throw std::runtime_error("hensel_split: lifting did not converge");
    out.low = low;
    out.high = high;
    auto st = bezout(ring, high, low);
    out.s = st.first;
    out.t = st.second;
  }
  return out;
}

template <class R>
std::pair<Poly<R>, Poly<R>> hensel_split(const R& ring, const Poly<R>& a, const Rational& cut) {
  Poly<R> b = a;
  poly_trim(ring, b);
  auto lead = b.back();
  auto sp = hensel_split_full(ring, b, cut);
  for (auto& c : sp.high) c = ring.mul(c, lead);
  return {sp.low, sp.high};
}

/// B with B = 1 mod low and B = 0 mod high, deg B < deg full.
template <class R>
Poly<R> crt_projector(const R& ring, const Poly<R>& low, const Poly<R>& high, const Poly<R>& full) {
  Poly<R> l = low, h = high;
  poly_trim(ring, l);
  poly_trim(ring, h);
  if (l.size() <= 1) return {};
  // make the high part monic for the Bezout seed; low is monic already
  if (ring.valuation(l.back()) != 0) throw std::domain_error("crt_projector: low part leading coefficient not a unit");
  auto li = ring.inverse(l.back());
  for (auto& c : l) c = ring.mul(c, li);
  auto [s, t] = bezout(ring, h, l);
  auto b = poly_mul(ring, s, h);
  Poly<R> f = full;
  poly_trim(ring, f);
  return poly_mod(ring, b, f);
}

/// B(A) v by Horner's rule on vectors.
template <class R>
std::vector<typename R::value_type> poly_apply(const R& ring, const Poly<R>& b, const Matrix<R>& a,
                                               const std::vector<typename R::value_type>& v) {
  std::vector<typename R::value_type> w(v.size(), ring.zero());
  for (std::size_t i = b.size(); i-- > 0;) {
    w = mat_vec(ring, a, w);
    for (std::size_t j = 0; j < v.size(); ++j) w[j] = ring.add(w[j], ring.mul(b[i], v[j]));
  }
  return w;
}

/// B(A) as a matrix.
template <class R>
Matrix<R> poly_matrix(const R& ring, const Poly<R>& b, const Matrix<R>& a) {
  auto w = zero_matrix(ring, a.rows, a.cols);
  for (std::size_t i = b.size(); i-- > 0;) {
    w = mat_mul(ring, w, a);
    for (std::size_t j = 0; j < a.rows; ++j) w(j, j) = ring.add(w(j, j), b[i]);
  }
  return w;
}

}  // namespace katz
