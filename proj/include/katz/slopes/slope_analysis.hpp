#pragma once

#include "katz/padic/newton.hpp"
#include "katz/padic/rational.hpp"
#include "katz/upcompact/char_series.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace katz {

struct SlopeSequence {
  u64 p = 0;
  int level = 1, weight = 0, m = 0, blocks = 0;
  std::size_t q_precision = 0, dim = 0;
  std::vector<NewtonSegment> entries;  ///< strictly increasing slopes < certified_cutoff
  Rational certified_cutoff{0};
  Rational proven_cutoff{0};
  std::map<std::string, std::string> provenance;

  std::int64_t total_multiplicity() const {
    std::int64_t t = 0;
    for (const auto& e : entries) t += e.width;
    return t;
  }
  /// Multiplicity of a slope (0 if absent).
  std::int64_t multiplicity(const Rational& s) const {
    for (const auto& e : entries)
      if (e.slope == s) return e.width;
    return 0;
  }
};

/// Merge equal slopes and drop everything at or above the cutoff.
inline std::vector<NewtonSegment> normalize_slopes(std::vector<NewtonSegment> v, const Rational& cutoff) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.slope < b.slope; });
  std::vector<NewtonSegment> out;
  for (const auto& s : v) {
    if (s.width <= 0) throw std::invalid_argument("slope multiplicity must be positive");
    if (!(s.slope < cutoff)) continue;
    if (!out.empty() && out.back().slope == s.slope) out.back().width += s.width;
    else out.push_back(s);
  }
  return out;
}

inline SlopeSequence slopes(const CharSeries& cs) {
  SlopeSequence s;
  s.p = cs.p;
  s.level = cs.level;
  s.weight = cs.weight;
  s.m = cs.m;
  s.blocks = cs.blocks;
  s.q_precision = cs.q_precision;
  s.dim = cs.dim;
  s.certified_cutoff = cs.certified_cutoff;
  s.proven_cutoff = cs.proven_cutoff;
  s.entries = normalize_slopes(cs.certified, cs.certified_cutoff);
  s.provenance = cs.provenance;
  return s;
}

/// "0_12 1_14 14/5_5 ..."
inline std::string format_slopes(const std::vector<NewtonSegment>& v) {
  std::string out;
  for (const auto& e : v) {
    if (!out.empty()) out += ' ';
    out += to_string(e.slope) + "_" + std::to_string(e.width);
  }
  return out;
}

inline std::string to_csv(const SlopeSequence& s) {
  std::ostringstream os;
  os << "slope,multiplicity\n";
  for (const auto& e : s.entries) os << to_string(e.slope) << ',' << e.width << '\n';
  return os.str();
}

struct SlopeDiff {
  Rational slope;
  std::int64_t first = 0, second = 0;  ///< multiplicities (0 = absent)
  bool operator==(const SlopeDiff&) const = default;
};

struct AgreementReport {
  int k1 = 0, k2 = 0;
  Rational compared_below{0};                 ///< min of the two certified cutoffs
  bool full_agreement = false;                ///< everything below compared_below agrees
  std::optional<Rational> first_disagreement; ///< smallest slope whose multiplicities differ
  std::optional<Rational> alpha_max;          ///< largest agreeing slope value (cutoff when full); none if disagreement at the first slope
  std::optional<int> congruence_depth;        ///< largest a with k1 = k2 mod p^a(p-1); none if k1 = k2
  bool congruent_mod_p_minus_1 = true;
  std::vector<SlopeDiff> diffs;
};

namespace detail {

inline std::vector<SlopeDiff> merge_below(const SlopeSequence& a, const SlopeSequence& b, const Rational& cut) {
  std::map<Rational, SlopeDiff> m;
  for (const auto& e : a.entries)
    if (e.slope < cut) m[e.slope] = {e.slope, e.width, 0};
  for (const auto& e : b.entries)
    if (e.slope < cut) {
      auto& d = m[e.slope];
      d.slope = e.slope;
      d.second = e.width;
    }
  std::vector<SlopeDiff> out;
  for (auto& [k, v] : m) out.push_back(v);
  return out;
}

}  // namespace detail

/// Largest a with k1 = k2 mod p^a (p-1); nullopt when k1 = k2, -1 when k1 != k2 mod (p-1).
inline std::optional<int> congruence_depth(u64 p, std::int64_t k1, std::int64_t k2) {
  std::int64_t d = k1 - k2;
  if (d == 0) return std::nullopt;
  if (d % static_cast<std::int64_t>(p - 1) != 0) return -1;
  d /= static_cast<std::int64_t>(p - 1);
  int a = 0;
  while (d % static_cast<std::int64_t>(p) == 0) {
    d /= static_cast<std::int64_t>(p);
    ++a;
  }
  return a;
}

inline AgreementReport compare_weights(const SlopeSequence& s1, const SlopeSequence& s2) {
  if (s1.p != s2.p || s1.level != s2.level) throw std::invalid_argument("compare_weights: sequences have different (p, N)");
  AgreementReport r;
  r.k1 = s1.weight;
  r.k2 = s2.weight;
  r.compared_below = std::min(s1.certified_cutoff, s2.certified_cutoff);
  r.congruence_depth = congruence_depth(s1.p, s1.weight, s2.weight);
  r.congruent_mod_p_minus_1 = !r.congruence_depth || *r.congruence_depth >= 0;
  std::optional<Rational> last_agree;
  for (const auto& d : detail::merge_below(s1, s2, r.compared_below)) {
    if (d.first == d.second) {
      if (!r.first_disagreement) last_agree = d.slope;
      continue;
    }
    r.diffs.push_back(d);
    if (!r.first_disagreement) r.first_disagreement = d.slope;
  }
  r.full_agreement = !r.first_disagreement;
  r.alpha_max = r.full_agreement ? std::optional<Rational>(r.compared_below) : last_agree;
  return r;
}

struct LevelDiff {
  int n1 = 0, n2 = 0;
  Rational compared_below{0};
  std::vector<Rational> only_first, only_second;  ///< slope values present in one sequence only
  std::vector<SlopeDiff> multiplicity_deltas;     ///< common slopes with different multiplicity
  bool empty(bool ignore_multiplicity) const {
    return only_first.empty() && only_second.empty() && (ignore_multiplicity || multiplicity_deltas.empty());
  }
};

inline LevelDiff compare_levels(const SlopeSequence& s1, const SlopeSequence& s2, bool ignore_multiplicity = true) {
  if (s1.p != s2.p || s1.weight != s2.weight) throw std::invalid_argument("compare_levels: sequences have different (p, k)");
  LevelDiff r;
  r.n1 = s1.level;
  r.n2 = s2.level;
  r.compared_below = std::min(s1.certified_cutoff, s2.certified_cutoff);
  for (const auto& d : detail::merge_below(s1, s2, r.compared_below)) {
    if (d.second == 0) r.only_first.push_back(d.slope);
    else if (d.first == 0) r.only_second.push_back(d.slope);
    else if (!ignore_multiplicity && d.first != d.second) r.multiplicity_deltas.push_back(d);
  }
  return r;
}

}  // namespace katz
