#pragma once

#include <gmp.h>
#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace katz {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

/// Prime, target digits m, and guard digits. Arithmetic runs modulo p^(m+buffer).
struct PadicContext {
  u64 p = 2;
  int m = 1;
  int buffer = 0;

  PadicContext() = default;
  PadicContext(u64 prime, int digits, int guard = 0) : p(prime), m(digits), buffer(guard) {
    if (!is_prime(p)) throw std::invalid_argument("p must be prime");
    if (m < 1) throw std::invalid_argument("precision m must be positive");
    if (buffer < 0) throw std::invalid_argument("buffer must be non-negative");
  }
  int working_digits() const { return m + buffer; }
};

/// Number of bits needed to hold p^digits.
inline double log2_power(u64 p, int digits) {
  double b = 0;
  u64 x = p;
  while (x > 1) { b += 1; x >>= 1; }
  // crude upper estimate is fine for backend selection
  return digits * (b + 1.0);
}

inline mpz_class mpz_from_u128(u128 v) {
  mpz_class r = static_cast<unsigned long>(static_cast<u64>(v >> 64));
  r <<= 64;
  r += static_cast<unsigned long>(static_cast<u64>(v));
  return r;
}

inline u128 u128_from_mpz(const mpz_class& z) {
  // z must be non-negative and < 2^128
  mpz_class hi = z >> 64;
  mpz_class lo = z - (hi << 64);
  return (static_cast<u128>(hi.get_ui()) << 64) | static_cast<u128>(lo.get_ui());
}

inline mpz_class mpz_pow(u64 p, int e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), p, static_cast<unsigned long>(e));
  return r;
}

// ---------------------------------------------------------------------------
// Residue rings Z/p^k. Every backend exposes the same static interface so the
// algorithms below can be written once as templates:
//
//   value_type, Acc
//   p(), digits(), zero(), one(), from_int(), from_mpz(), to_mpz()
//   add, sub, neg, mul, is_zero, valuation, inverse (units only)
//   exact_div_p(x, v)   representative of x / p^v (x divisible by p^v)
//   acc_zero, fma(acc, a, b), reduce(acc)
// ---------------------------------------------------------------------------

/// Z/p^k with p^k < 2^62.
class Mod64 {
 public:
  using value_type = u64;
  using Acc = u128;

  Mod64() = default;
  Mod64(u64 p, int digits) : p_(p), digits_(digits) {
    if (!fits(p, digits)) throw std::invalid_argument("Mod64: modulus too large");
    mod_ = 1;
    for (int i = 0; i < digits; ++i) mod_ *= p;
    pow2_ = (p == 2);
    mask_ = mod_ - 1;
    // leave room so that acc + product never wraps
    acc_limit_ = ~u128(0) - u128(mod_) * u128(mod_);
  }

  static bool fits(u64 p, int digits) {
    if (digits < 1) return false;
    u128 m = 1;
    for (int i = 0; i < digits; ++i) {
      m *= p;
      if (m >= (u128(1) << 62)) return false;
    }
    return true;
  }

  u64 p() const { return p_; }
  int digits() const { return digits_; }
  u64 modulus() const { return mod_; }

  value_type zero() const { return 0; }
  value_type one() const { return mod_ == 1 ? 0 : 1; }
  value_type from_int(long long v) const {
    long long r = v % static_cast<long long>(mod_);
    if (r < 0) r += static_cast<long long>(mod_);
    return static_cast<u64>(r);
  }
  value_type from_mpz(const mpz_class& z) const {
    mpz_class r = z % mpz_class(static_cast<unsigned long>(mod_));
    if (r < 0) r += static_cast<unsigned long>(mod_);
    return r.get_ui();
  }
  mpz_class to_mpz(value_type x) const { return mpz_class(static_cast<unsigned long>(x)); }

  value_type add(value_type a, value_type b) const {
    u64 s = a + b;
    return s >= mod_ ? s - mod_ : s;
  }
  value_type sub(value_type a, value_type b) const { return a >= b ? a - b : a + mod_ - b; }
  value_type neg(value_type a) const { return a == 0 ? 0 : mod_ - a; }
  value_type mul(value_type a, value_type b) const {
    if (pow2_) return (a * b) & mask_;
    return static_cast<u64>((u128(a) * b) % mod_);
  }
  bool is_zero(value_type a) const { return a == 0; }
  bool equal(value_type a, value_type b) const { return a == b; }

  int valuation(value_type a) const {
    if (a == 0) return digits_;
    if (pow2_) return __builtin_ctzll(a);
    int v = 0;
    while (a % p_ == 0) { a /= p_; ++v; }
    return v;
  }
  value_type exact_div_p(value_type a, int v) const {
    for (int i = 0; i < v; ++i) a /= p_;
    return a;
  }
  value_type mul_p_pow(value_type a, int e) const {
    for (int i = 0; i < e && a != 0; ++i) a = mul(a, p_ % mod_);
    return a;
  }
  value_type inverse(value_type a) const {
    if (a % p_ == 0) throw std::domain_error("inverse of a non-unit");
    // Newton iteration x <- x(2 - a x) from an inverse mod p.
    u64 x = 1;
    u64 ap = a % p_;
    for (u64 t = 1; t < p_; ++t)
      if ((ap * t) % p_ == 1) { x = t; break; }
    for (u128 prec = p_; prec < mod_; prec *= prec) x = mul(x, sub(from_int(2), mul(a, x)));
    return x;
  }

  Acc acc_zero() const { return 0; }
  void fma(Acc& acc, value_type a, value_type b) const {
    if (pow2_) { acc += u128(a) * b; return; }  // wraps mod 2^128, modulus divides it
    if (acc > acc_limit_) acc %= mod_;
    acc += u128(a) * b;
  }
  value_type reduce(const Acc& acc) const {
    if (pow2_) return static_cast<u64>(acc) & mask_;
    return static_cast<u64>(acc % mod_);
  }

  std::string to_string(value_type a) const { return std::to_string(a); }

 private:
  u64 p_ = 2;
  int digits_ = 1;
  u64 mod_ = 2;
  u64 mask_ = 1;
  bool pow2_ = true;
  u128 acc_limit_ = 0;
};

namespace detail {

struct U256 {
  u64 w[4] = {0, 0, 0, 0};
};

inline U256 mul_wide(u128 a, u128 b) {
  u64 a0 = static_cast<u64>(a), a1 = static_cast<u64>(a >> 64);
  u64 b0 = static_cast<u64>(b), b1 = static_cast<u64>(b >> 64);
  u128 p00 = u128(a0) * b0;
  u128 p01 = u128(a0) * b1;
  u128 p10 = u128(a1) * b0;
  u128 p11 = u128(a1) * b1;
  U256 r;
  r.w[0] = static_cast<u64>(p00);
  u128 mid = (p00 >> 64) + static_cast<u64>(p01) + static_cast<u64>(p10);
  r.w[1] = static_cast<u64>(mid);
  u128 hi = (mid >> 64) + (p01 >> 64) + (p10 >> 64) + static_cast<u64>(p11);
  r.w[2] = static_cast<u64>(hi);
  r.w[3] = static_cast<u64>((hi >> 64) + (p11 >> 64));
  return r;
}

}  // namespace detail

/// Z/p^k with p^k < 2^125. Power-of-two moduli reduce by masking; odd moduli
/// go through mpn division on the 256-bit product.
class Mod128 {
 public:
  using value_type = u128;
  struct Acc {
    u64 w[5] = {0, 0, 0, 0, 0};
  };

  Mod128() = default;
  Mod128(u64 p, int digits) : p_(p), digits_(digits) {
    if (!fits(p, digits)) throw std::invalid_argument("Mod128: modulus too large");
    mod_ = 1;
    for (int i = 0; i < digits; ++i) mod_ *= p;
    pow2_ = (p == 2);
    mask_ = mod_ - 1;
    ml_[0] = static_cast<u64>(mod_);
    ml_[1] = static_cast<u64>(mod_ >> 64);
    mn_ = ml_[1] ? 2 : 1;
  }

  static bool fits(u64 p, int digits) {
    if (digits < 1) return false;
    mpz_class m = mpz_pow(p, digits);
    return mpz_sizeinbase(m.get_mpz_t(), 2) <= 125;
  }

  u64 p() const { return p_; }
  int digits() const { return digits_; }

  value_type zero() const { return 0; }
  value_type one() const { return 1; }
  value_type from_int(long long v) const {
    if (v >= 0) return u128(static_cast<u64>(v)) % mod_;
    u128 r = u128(static_cast<u64>(-(v + 1)) + 1) % mod_;
    return r == 0 ? 0 : mod_ - r;
  }
  value_type from_mpz(const mpz_class& z) const {
    mpz_class mz = mpz_from_u128(mod_);
    mpz_class r = z % mz;
    if (r < 0) r += mz;
    return u128_from_mpz(r);
  }
  mpz_class to_mpz(value_type x) const { return mpz_from_u128(x); }

  value_type add(value_type a, value_type b) const {
    u128 s = a + b;
    return s >= mod_ ? s - mod_ : s;
  }
  value_type sub(value_type a, value_type b) const { return a >= b ? a - b : a + mod_ - b; }
  value_type neg(value_type a) const { return a == 0 ? 0 : mod_ - a; }
  value_type mul(value_type a, value_type b) const {
    if (pow2_) return (a * b) & mask_;
    detail::U256 prod = detail::mul_wide(a, b);
    return reduce_limbs(prod.w, 4);
  }
  bool is_zero(value_type a) const { return a == 0; }
  bool equal(value_type a, value_type b) const { return a == b; }

  int valuation(value_type a) const {
    if (a == 0) return digits_;
    if (pow2_) {
      u64 lo = static_cast<u64>(a);
      return lo ? __builtin_ctzll(lo) : 64 + __builtin_ctzll(static_cast<u64>(a >> 64));
    }
    int v = 0;
    while (a % p_ == 0) { a /= p_; ++v; }
    return v;
  }
  value_type exact_div_p(value_type a, int v) const {
    if (pow2_) return a >> v;
    for (int i = 0; i < v; ++i) a /= p_;
    return a;
  }
  value_type mul_p_pow(value_type a, int e) const {
    for (int i = 0; i < e && a != 0; ++i) a = mul(a, p_);
    return a;
  }
  value_type inverse(value_type a) const {
    if (a % p_ == 0) throw std::domain_error("inverse of a non-unit");
    u128 x = 1;
    u64 ap = static_cast<u64>(a % p_);
    for (u64 t = 1; t < p_; ++t)
      if ((u128(ap) * t) % p_ == 1) { x = t; break; }
    mpz_class prec = p_;
    mpz_class mz = mpz_from_u128(mod_);
    while (prec < mz) {
      x = mul(x, sub(2, mul(a, x)));
      prec *= prec;
    }
    return x;
  }

  Acc acc_zero() const { return Acc{}; }
  void fma(Acc& acc, value_type a, value_type b) const {
    if (pow2_) {
      u128 s = (static_cast<u128>(acc.w[1]) << 64 | acc.w[0]) + a * b;
      acc.w[0] = static_cast<u64>(s);
      acc.w[1] = static_cast<u64>(s >> 64);
      return;
    }
    detail::U256 prod = detail::mul_wide(a, b);
    u64 carry = mpn_add_n(acc.w, acc.w, prod.w, 4);
    acc.w[4] += carry;
  }
  value_type reduce(const Acc& acc) const {
    if (pow2_) return (static_cast<u128>(acc.w[1]) << 64 | acc.w[0]) & mask_;
    return reduce_limbs(acc.w, 5);
  }

  std::string to_string(value_type a) const { return to_mpz(a).get_str(); }

 private:
  value_type reduce_limbs(const u64* limbs, int n) const {
    mp_limb_t num[5];
    int len = n;
    for (int i = 0; i < n; ++i) num[i] = limbs[i];
    while (len > 0 && num[len - 1] == 0) --len;
    if (len < mn_) {
      u128 r = 0;
      for (int i = len - 1; i >= 0; --i) r = (r << 64) | num[i];
      return r;
    }
    mp_limb_t q[5], r[2] = {0, 0};
    mp_limb_t d[2] = {ml_[0], ml_[1]};
    mpn_tdiv_qr(q, r, 0, num, len, d, mn_);
    return (mn_ == 2 ? (static_cast<u128>(r[1]) << 64) : u128(0)) | r[0];
  }

  u64 p_ = 2;
  int digits_ = 1;
  u128 mod_ = 2;
  u128 mask_ = 1;
  bool pow2_ = true;
  u64 ml_[2] = {2, 0};
  int mn_ = 1;
};

/// Z/p^k for any k, backed by GMP.
class ModMpz {
 public:
  using value_type = mpz_class;
  using Acc = mpz_class;

  ModMpz() = default;
  ModMpz(u64 p, int digits) : p_(p), digits_(digits), mod_(mpz_pow(p, digits)) {
    if (digits < 1) throw std::invalid_argument("ModMpz: digits must be positive");
    pow2_ = (p == 2);
  }

  u64 p() const { return p_; }
  int digits() const { return digits_; }
  const mpz_class& modulus() const { return mod_; }

  value_type zero() const { return 0; }
  value_type one() const { return 1; }
  value_type from_int(long long v) const { return from_mpz(mpz_class(std::to_string(v))); }
  value_type from_mpz(const mpz_class& z) const {
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), z.get_mpz_t(), mod_.get_mpz_t());
    return r;
  }
  mpz_class to_mpz(const value_type& x) const { return x; }

  value_type add(const value_type& a, const value_type& b) const {
    mpz_class s = a + b;
    if (s >= mod_) s -= mod_;
    return s;
  }
  value_type sub(const value_type& a, const value_type& b) const {
    mpz_class s = a - b;
    if (s < 0) s += mod_;
    return s;
  }
  value_type neg(const value_type& a) const { return a == 0 ? mpz_class(0) : mpz_class(mod_ - a); }
  value_type mul(const value_type& a, const value_type& b) const {
    mpz_class r = a * b;
    reduce_in_place(r);
    return r;
  }
  bool is_zero(const value_type& a) const { return a == 0; }
  bool equal(const value_type& a, const value_type& b) const { return a == b; }

  int valuation(const value_type& a) const {
    if (a == 0) return digits_;
    if (pow2_) return static_cast<int>(mpz_scan1(a.get_mpz_t(), 0));
    mpz_class t;
    mpz_class pz = static_cast<unsigned long>(p_);
    return static_cast<int>(mpz_remove(t.get_mpz_t(), a.get_mpz_t(), pz.get_mpz_t()));
  }
  value_type exact_div_p(const value_type& a, int v) const {
    mpz_class r;
    mpz_divexact(r.get_mpz_t(), a.get_mpz_t(), mpz_pow(p_, v).get_mpz_t());
    return r;
  }
  value_type mul_p_pow(const value_type& a, int e) const { return mul(a, from_mpz(mpz_pow(p_, e))); }
  value_type inverse(const value_type& a) const {
    mpz_class r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), mod_.get_mpz_t()) == 0)
      throw std::domain_error("inverse of a non-unit");
    return r;
  }

  Acc acc_zero() const { return 0; }
  void fma(Acc& acc, const value_type& a, const value_type& b) const {
    mpz_addmul(acc.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  }
  value_type reduce(const Acc& acc) const { return from_mpz(acc); }

  std::string to_string(const value_type& a) const { return a.get_str(); }

 private:
  void reduce_in_place(mpz_class& r) const {
    if (pow2_) mpz_fdiv_r_2exp(r.get_mpz_t(), r.get_mpz_t(), static_cast<unsigned long>(digits_));
    else mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), mod_.get_mpz_t());
  }

  u64 p_ = 2;
  int digits_ = 1;
  mpz_class mod_ = 2;
  bool pow2_ = true;
};

/// Calls f with the cheapest backend able to hold p^digits.
template <class F>
decltype(auto) with_ring(u64 p, int digits, F&& f) {
  if (Mod64::fits(p, digits)) return f(Mod64(p, digits));
  if (Mod128::fits(p, digits)) return f(Mod128(p, digits));
  return f(ModMpz(p, digits));
}

/// Converts between two residue rings of the same prime (reducing or lifting
/// the canonical representative).
template <class To, class From>
typename To::value_type convert(const To& to, const From& from, const typename From::value_type& x) {
  if constexpr (std::is_same_v<To, Mod64> && std::is_same_v<From, Mod64>) {
    return x % to.modulus();
  } else {
    return to.from_mpz(from.to_mpz(x));
  }
}

}  // namespace katz
