#pragma once

#include <gmpxx.h>
#include <openssl/evp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace katz {

/// Raised when a required fixture file is absent.
class MissingFixture : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFixture("cannot open fixture file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Default fixture directory: $KATZ_FIXTURES, else <source>/fixtures.
inline std::filesystem::path default_fixture_dir() {
  if (const char* env = std::getenv("KATZ_FIXTURES"); env && *env) return env;
#ifdef KATZ_SOURCE_DIR
  return std::filesystem::path(KATZ_SOURCE_DIR) / "fixtures";
#else
  return "fixtures";
#endif
}

struct RawBasis {
  int level = 0, weight = 0;
  std::size_t q_precision = 0;
  std::vector<std::vector<mpz_class>> rows;
  std::string digest;
};

/// Parses a basis fixture: header "N k dim T", then dim rows of T integers.
inline RawBasis parse_basis(const std::string& text) {
  std::istringstream in(text);
  RawBasis b;
  std::size_t dim = 0;
  if (!(in >> b.level >> b.weight >> dim >> b.q_precision)) throw std::runtime_error("basis fixture: bad header");
  b.rows.assign(dim, std::vector<mpz_class>(b.q_precision));
  std::string tok;
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t i = 0; i < b.q_precision; ++i) {
      if (!(in >> tok)) throw std::runtime_error("basis fixture: truncated data");
      if (b.rows[r][i].set_str(tok, 10) != 0) throw std::runtime_error("basis fixture: bad integer '" + tok + "'");
    }
  if (in >> tok) throw std::runtime_error("basis fixture: trailing data");
  b.digest = sha256_hex(text);
  return b;
}

struct Newform {
  std::string label;
  int level = 0, weight = 2;
  std::vector<mpz_class> coeffs;  ///< a_0 .. a_{T-1}
  std::string digest;
};

/// Parses a newform fixture: header "N k label T", then T integers.
inline Newform parse_newform(const std::string& text) {
  std::istringstream in(text);
  Newform f;
  std::size_t t = 0;
  if (!(in >> f.level >> f.weight >> f.label >> t)) throw std::runtime_error("newform fixture: bad header");
  f.coeffs.resize(t);
  std::string tok;
  for (std::size_t i = 0; i < t; ++i) {
    if (!(in >> tok)) throw std::runtime_error("newform fixture: truncated data");
    if (f.coeffs[i].set_str(tok, 10) != 0) throw std::runtime_error("newform fixture: bad integer '" + tok + "'");
  }
  if (t < 2 || f.coeffs[0] != 0 || f.coeffs[1] != 1) throw std::runtime_error("newform fixture: expected a_0 = 0, a_1 = 1");
  f.digest = sha256_hex(text);
  return f;
}

/// Weight-2 and weight-4 bases for one level, loaded from a directory.
struct FixtureSet {
  int level = 1;
  std::filesystem::path dir;
  std::map<int, RawBasis> bases;

  static std::string basis_name(int level, int weight) {
    return "N" + std::to_string(level) + "_k" + std::to_string(weight) + ".txt";
  }

  /// Loads the generator weights for this level; level 1 needs nothing.
  /// Weights 2 and 4 are required, weight 6 is used when present.
  static FixtureSet load(int level, const std::filesystem::path& dir = default_fixture_dir(),
                         const std::vector<int>& weights = {2, 4}, const std::vector<int>& optional = {6}) {
    FixtureSet fs;
    fs.level = level;
    fs.dir = dir;
    if (level == 1) return fs;
    std::vector<int> all = weights;
    for (int k : optional)
      if (std::filesystem::exists(dir / basis_name(level, k))) all.push_back(k);
    for (int k : all) {
      auto path = dir / basis_name(level, k);
      if (!std::filesystem::exists(path))
        throw MissingFixture("missing fixture " + path.string() + " for level " + std::to_string(level) +
                             " weight " + std::to_string(k) + " (supply a fixture for this weight)");
      auto b = parse_basis(read_file(path));
      if (b.level != level || b.weight != k) throw std::runtime_error("fixture header mismatch in " + path.string());
      fs.bases.emplace(k, std::move(b));
    }
    return fs;
  }

  const RawBasis* find(int k) const {
    auto it = bases.find(k);
    return it == bases.end() ? nullptr : &it->second;
  }

  std::map<std::string, std::string> digests() const {
    std::map<std::string, std::string> d;
    for (const auto& [k, b] : bases) d[basis_name(level, k)] = b.digest;
    return d;
  }
};

inline Newform load_newform(const std::string& label, const std::filesystem::path& dir = default_fixture_dir()) {
  auto path = dir / (label + ".txt");
  if (!std::filesystem::exists(path)) throw MissingFixture("missing newform fixture " + path.string());
  return parse_newform(read_file(path));
}

}  // namespace katz
