#pragma once

#include "katz/chowheegner/curve.hpp"
#include "katz/chowheegner/lvalue.hpp"
#include "katz/padic/recognize.hpp"

#include <gmpxx.h>

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace katz {

/// Expected relation for the ratio c = lambda / log_P: either c = a/b, or
/// c2 c^2 + c1 c + c0 = 0.
struct ExpectedRelation {
  std::optional<mpq_class> rational;
  std::optional<std::array<mpz_class, 3>> quadratic;  ///< {c2, c1, c0}
};

struct ChowHeegnerJob {
  u64 p = 2;
  int m = 30;
  CurveModel curve;  ///< with generator
  std::string f, g;  ///< fixture labels
  std::optional<ExpectedRelation> expected;
};

struct VerifyReport {
  PadicNumber log_p;
  PadicNumber ratio;
  int digits = 0;                       ///< p-adic digits the relation is checked to
  int achieved = 0;                     ///< valuation of the relation residual (capped at the ratio's precision)
  std::optional<bool> pass;             ///< none without an expectation
  std::optional<Recognition> blind;     ///< what recognize() finds without a hint
  long log_multiplier = 1;
};

constexpr int kVerifyGuard = 6;
constexpr int kMinVerifyDigits = 20;

/// Check the expected relation for lambda / log_P modulo p^(m - guard).
inline VerifyReport verify_relation(const LValueResult& r, const PadicNumber& log_p, const std::optional<ExpectedRelation>& expected,
                                    int guard = kVerifyGuard) {
  if (log_p.is_zero()) throw std::domain_error("verify_relation: log_P vanishes to working precision");
  VerifyReport rep;
  rep.log_p = log_p;
  rep.ratio = padic_div(r.lambda, log_p);
  rep.digits = std::min(r.m - guard, rep.ratio.absolute_precision());
  if (rep.digits < kMinVerifyDigits)
    throw std::domain_error("verify_relation: only " + std::to_string(rep.digits) + " digits available, below the " + std::to_string(kMinVerifyDigits) +
                            " needed for reliable recognition");
  const u64 p = rep.ratio.p;
  const int work = rep.ratio.prec + 8;
  if (rep.ratio.shift == 0) rep.blind = recognize(rep.ratio, rep.digits);
  if (!expected) return rep;
  PadicNumber resid;
  if (expected->rational) {
    const auto& c = *expected->rational;
    resid = padic_sub(padic_mul(rep.ratio, padic_from_int(p, c.get_den(), work)), padic_from_int(p, c.get_num(), work));
  } else if (expected->quadratic) {
    const auto& q = *expected->quadratic;
    auto c2 = padic_mul(padic_from_int(p, q[0], work), padic_mul(rep.ratio, rep.ratio));
    auto c1 = padic_mul(padic_from_int(p, q[1], work), rep.ratio);
    resid = padic_add(padic_add(c2, c1), padic_from_int(p, q[2], work));
  } else {
    throw std::invalid_argument("verify_relation: empty expectation");
  }
  rep.achieved = resid.valuation();
  rep.pass = rep.achieved >= rep.digits;
  return rep;
}

struct ChowHeegnerOutcome {
  LValueResult lvalue;
  LogResult log;
  VerifyReport report;
};

/// lvalue + formal logarithm of the generator + verification.
inline ChowHeegnerOutcome run_chowheegner(const ChowHeegnerJob& job, const std::filesystem::path& fixture_dir, const LValueOptions& opt = {}) {
  auto f = load_newform(job.f, fixture_dir);
  auto g = load_newform(job.g, fixture_dir);
  if (!job.curve.contains(job.curve.generator)) throw std::invalid_argument("generator is not on the curve");
  ChowHeegnerOutcome out;
  out.lvalue = lvalue(f, g, job.p, job.m, fixture_dir, opt);
  out.log = padic_log_point(job.curve, job.curve.generator, job.p, job.m + opt.buffer);
  out.report = verify_relation(out.lvalue, out.log.value, job.expected);
  out.report.log_multiplier = out.log.multiplier;
  return out;
}

}  // namespace katz
