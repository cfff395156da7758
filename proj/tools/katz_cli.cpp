// Command-line front end: slope sequences, weight/level comparisons and
// Chow-Heegner verification jobs. Exit codes: 0 success, 1 bad arguments or
// failed computation, 2 missing fixture, 3 verification failure.

#include "katz/chowheegner/verify.hpp"
#include "katz/slopes/slope_analysis.hpp"
#include "katz/upcompact/char_series.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

using json = nlohmann::json;
using namespace katz;

namespace {

constexpr int kExitBadInput = 1;
constexpr int kExitMissingFixture = 2;
constexpr int kExitVerifyFailed = 3;
constexpr const char* kVersion = "0.1.0";

struct Output {
  std::string path;
  std::string format = "json";
};

void emit(const Output& out, const std::string& text) {
  if (out.path.empty() || out.path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out.path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + out.path);
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json slopes_json(const std::vector<NewtonSegment>& v) {
  json a = json::array();
  for (const auto& e : v) a.push_back(json::array({to_string(e.slope), e.width}));
  return a;
}

json rationals_json(const std::vector<Rational>& v) {
  json a = json::array();
  for (const auto& r : v) a.push_back(to_string(r));
  return a;
}

json sequence_json(const SlopeSequence& s) {
  json j;
  j["p"] = s.p;
  j["N"] = s.level;
  j["k"] = s.weight;
  j["m"] = s.m;
  j["certified_cutoff"] = to_string(s.certified_cutoff);
  j["proven_cutoff"] = to_string(s.proven_cutoff);
  j["slopes"] = slopes_json(s.entries);
  j["provenance"] = {{"I", s.blocks}, {"T", s.q_precision}, {"dim", s.dim}, {"fixtures", s.provenance}, {"version", kVersion}};
  return j;
}

struct SlopeArgs {
  u64 p = 2;
  int m = 10;
  int extra_blocks = 0;
  std::size_t extra_t = 0;
  int buffer = 8;
  std::string fixtures;
};

std::filesystem::path fixture_dir(const std::string& s) { return s.empty() ? default_fixture_dir() : std::filesystem::path(s); }

SlopeSequence run_slopes(const SlopeArgs& a, int level, int k) {
  auto fx = FixtureSet::load(level, fixture_dir(a.fixtures));
  SlopeOptions opt;
  opt.extra_blocks = a.extra_blocks;
  opt.extra_t = a.extra_t;
  opt.buffer = a.buffer;
  return slopes(char_series_for_weight(level, k, a.p, a.m, fx, opt));
}

void add_slope_options(CLI::App* c, SlopeArgs& a) {
  c->add_option("--p", a.p, "prime")->required()->check(CLI::Range(2, 1000));
  c->add_option("--m", a.m, "p-adic precision target (slopes certified below about m)")->required()->check(CLI::Range(1, 500));
  c->add_option("--extra-blocks", a.extra_blocks, "blocks beyond the computed count")->check(CLI::Range(0, 100));
  c->add_option("--extra-t", a.extra_t, "q-expansion terms beyond the computed length");
  c->add_option("--buffer", a.buffer, "guard digits above m")->check(CLI::Range(0, 100));
  c->add_option("--fixtures", a.fixtures, "fixture directory (default $KATZ_FIXTURES)");
}

mpq_class parse_mpq(const json& v) {
  if (v.is_number_integer()) return mpq_class(mpz_class(v.dump()));
  if (v.is_string()) {
    mpq_class q(v.get<std::string>());
    q.canonicalize();
    return q;
  }
  throw std::invalid_argument("expected an integer or a string \"a/b\", got " + v.dump());
}

mpz_class parse_mpz(const json& v) {
  if (v.is_number_integer()) return mpz_class(v.dump());
  if (v.is_string()) return mpz_class(v.get<std::string>());
  throw std::invalid_argument("expected an integer, got " + v.dump());
}

ChowHeegnerJob parse_job(const json& j, LValueOptions& opt) {
  ChowHeegnerJob job;
  job.p = j.at("p").get<u64>();
  job.m = j.at("m").get<int>();
  const auto& c = j.at("curve");
  if (!c.is_array() || c.size() != 5) throw std::invalid_argument("curve must be [a1,a2,a3,a4,a6]");
  for (int i = 0; i < 5; ++i) job.curve.a[i] = parse_mpz(c[i]);
  const auto& g = j.at("generator");
  if (!g.is_array() || g.size() != 2) throw std::invalid_argument("generator must be [x,y]");
  job.curve.generator = CurvePoint::affine(parse_mpq(g[0]), parse_mpq(g[1]));
  if (j.contains("conductor")) job.curve.conductor = j["conductor"].get<long>();
  job.f = j.at("f").get<std::string>();
  job.g = j.at("g").get<std::string>();
  if (j.contains("expected")) {
    const auto& e = j["expected"];
    ExpectedRelation ex;
    if (e.contains("rational")) ex.rational = parse_mpq(e["rational"]);
    else if (e.contains("quadratic")) {
      const auto& q = e["quadratic"];
      if (!q.is_array() || q.size() != 3) throw std::invalid_argument("quadratic must be [c2,c1,c0]");
      ex.quadratic = std::array<mpz_class, 3>{parse_mpz(q[0]), parse_mpz(q[1]), parse_mpz(q[2])};
    } else {
      throw std::invalid_argument("expected must hold \"rational\" or \"quadratic\"");
    }
    job.expected = ex;
  }
  if (j.contains("options")) {
    const auto& o = j["options"];
    if (o.contains("extra_blocks")) opt.extra_blocks = o["extra_blocks"].get<int>();
    if (o.contains("buffer")) opt.buffer = o["buffer"].get<int>();
    if (o.contains("max_separation_prime")) opt.max_separation_prime = o["max_separation_prime"].get<u64>();
  }
  if (!job.curve.contains(job.curve.generator)) throw std::invalid_argument("generator is not on the curve");
  return job;
}

json padic_json(const PadicNumber& a) {
  // value = digits / p^shift, digits known mod p^(precision + shift)
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), a.x.get_mpz_t(), mpz_pow(a.p, std::max(a.prec, 0)).get_mpz_t());
  return {{"digits", r.get_str()}, {"shift", a.shift}, {"precision", a.absolute_precision()}, {"valuation", a.valuation()}};
}

json outcome_json(const ChowHeegnerJob& job, const ChowHeegnerOutcome& o) {
  const auto& r = o.lvalue;
  const auto& v = o.report;
  json j;
  j["p"] = job.p;
  j["m"] = job.m;
  j["f"] = job.f;
  j["g"] = job.g;
  j["tame_level"] = r.tame_level;
  j["ordinary_rank"] = r.ordinary_rank;
  j["pre_iterations"] = r.pre_iterations;
  j["separation_primes"] = r.separation_primes;
  j["alpha"] = padic_json(r.alpha);
  j["lambda"] = padic_json(r.lambda);
  j["log"] = padic_json(o.log.value);
  j["log"]["multiplier"] = o.log.multiplier;
  j["ratio_padic"] = padic_json(v.ratio);
  j["checked_digits"] = v.digits;
  if (v.blind && v.blind->degree == 1) j["ratio"] = v.blind->text();
  if (v.blind && v.blind->degree == 2) {
    json c = json::array();
    for (std::size_t i = v.blind->coeffs.size(); i-- > 0;) c.push_back(v.blind->coeffs[i].get_str());
    j["relation"] = c;
  }
  if (!v.blind) j["ratio"] = nullptr;
  if (v.pass) {
    j["pass"] = *v.pass;
    j["achieved_digits"] = v.achieved;
  }
  std::map<std::string, std::string> prov = r.provenance;
  j["provenance"] = {{"I", r.blocks}, {"T", r.q_precision}, {"dim", r.dim}, {"mu", r.mu}, {"fixtures", prov}, {"version", kVersion}};
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Overconvergent U_p slopes and Chow-Heegner verification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Output out;
  app.add_option("-o,--out", out.path, "output file (default stdout)");

  SlopeArgs sa;
  int level = 1, k = 0;
  auto* cs = app.add_subcommand("slopes", "slope sequence of U_p on weight-k overconvergent forms");
  add_slope_options(cs, sa);
  cs->add_option("--N", level, "tame level")->required()->check(CLI::Range(1, 100000));
  cs->add_option("--k", k, "weight (even)")->required();
  cs->add_option("--format", out.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  SlopeArgs ca;
  int cn = 1, k1 = 0, k2 = 0;
  auto* cc = app.add_subcommand("compare", "compare slope sequences of two weights");
  add_slope_options(cc, ca);
  cc->add_option("--N", cn, "tame level")->required()->check(CLI::Range(1, 100000));
  cc->add_option("--k1", k1, "first weight")->required();
  cc->add_option("--k2", k2, "second weight")->required();

  SlopeArgs la;
  int n1 = 1, n2 = 1, lk = 0;
  bool with_mult = false;
  auto* cl = app.add_subcommand("compare-levels", "compare slope sets of two tame levels");
  add_slope_options(cl, la);
  cl->add_option("--N1", n1, "first level")->required()->check(CLI::Range(1, 100000));
  cl->add_option("--N2", n2, "second level")->required()->check(CLI::Range(1, 100000));
  cl->add_option("--k", lk, "weight")->required();
  cl->add_flag("--with-multiplicity", with_mult, "also report multiplicity differences");

  std::string jobfile, ch_fixtures;
  std::optional<int> m_override;
  auto* ch = app.add_subcommand("chowheegner", "triple-product L-value against a formal logarithm");
  ch->add_option("job", jobfile, "job file (JSON)")->required()->check(CLI::ExistingFile);
  ch->add_option("--fixtures", ch_fixtures, "fixture directory (default $KATZ_FIXTURES)");
  ch->add_option("--m", m_override, "override the job precision");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitBadInput;
  }

  try {
    if (*cs) {
      auto s = run_slopes(sa, level, k);
      emit(out, out.format == "csv" ? to_csv(s) : dump(sequence_json(s)));
      return 0;
    }
    if (*cc) {
      auto s1 = run_slopes(ca, cn, k1);
      auto s2 = run_slopes(ca, cn, k2);
      auto r = compare_weights(s1, s2);
      json j;
      j["p"] = ca.p;
      j["N"] = cn;
      j["k1"] = k1;
      j["k2"] = k2;
      j["m"] = ca.m;
      j["compared_below"] = to_string(r.compared_below);
      j["full_agreement"] = r.full_agreement;
      j["first_disagreement"] = r.first_disagreement ? json(to_string(*r.first_disagreement)) : json(nullptr);
      j["alpha_max"] = r.alpha_max ? json(to_string(*r.alpha_max)) : json(nullptr);
      j["congruence_depth"] = r.congruence_depth ? json(*r.congruence_depth) : json(nullptr);
      j["congruent_mod_p_minus_1"] = r.congruent_mod_p_minus_1;
      json d = json::array();
      for (const auto& x : r.diffs) d.push_back({to_string(x.slope), x.first, x.second});
      j["diffs"] = d;
      j["first"] = sequence_json(s1);
      j["second"] = sequence_json(s2);
      emit(out, dump(j));
      return 0;
    }
    if (*cl) {
      auto s1 = run_slopes(la, n1, lk);
      auto s2 = run_slopes(la, n2, lk);
      auto r = compare_levels(s1, s2, !with_mult);
      json j;
      j["p"] = la.p;
      j["k"] = lk;
      j["N1"] = n1;
      j["N2"] = n2;
      j["m"] = la.m;
      j["compared_below"] = to_string(r.compared_below);
      j["only_first"] = rationals_json(r.only_first);
      j["only_second"] = rationals_json(r.only_second);
      json d = json::array();
      for (const auto& x : r.multiplicity_deltas) d.push_back({to_string(x.slope), x.first, x.second});
      j["multiplicity_deltas"] = d;
      j["empty"] = r.empty(!with_mult);
      j["first"] = sequence_json(s1);
      j["second"] = sequence_json(s2);
      emit(out, dump(j));
      return 0;
    }
    if (*ch) {
      std::ifstream in(jobfile);
      json jj;
      try {
        jj = json::parse(in);
      } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("job file: ") + e.what());
      }
      LValueOptions opt;
      ChowHeegnerJob job;
      try {
        job = parse_job(jj, opt);
      } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("job file: ") + e.what());
      }
      if (m_override) job.m = *m_override;
      auto o = run_chowheegner(job, fixture_dir(ch_fixtures), opt);
      emit(out, dump(outcome_json(job, o)));
      return (o.report.pass && !*o.report.pass) ? kExitVerifyFailed : 0;
    }
  } catch (const MissingFixture& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissingFixture;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
