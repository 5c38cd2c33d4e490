#pragma once

// Configuration and artifact formats of the command-line driver. Needs
// OpenSSL (libcrypto) for the content hash; not included by csxlab.hpp.

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/sha.h>

#include "csxlab/weighted_grid.hpp"

namespace csxlab::cli {

using json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
  std::string key;
  ConfigError(std::string k, const std::string& what) : std::runtime_error(what), key(std::move(k)) {}
};

enum class Kind { real, integer, reals, integers, text, boolean };

struct KeySpec {
  std::string name;
  Kind kind;
  std::string fallback;
  std::string doc;
  double lo = -INFINITY, hi = INFINITY;  ///< inclusive bounds on every number
  std::vector<std::string> choices;      ///< text values allowed besides numbers; empty = any
};

// ---- value parsing ----------------------------------------------------------

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

inline bool parse_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size() && std::isfinite(out);
}

inline bool parse_int(const std::string& s, long& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtol(s.c_str(), &end, 10);
  return errno == 0 && end == s.c_str() + s.size();
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(trim(item));
  return out;
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped,
/// a leading `[section]` line is rejected (the format is flat).
inline std::map<std::string, std::string> parse_config(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (value.size() >= 2 && value.front() == '[' && value.back() == ']') value = trim(value.substr(1, value.size() - 2));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": empty key");
    if (!out.emplace(key, value).second) throw ConfigError(key, "duplicate key");
  }
  return out;
}

// ---- resolved configuration -------------------------------------------------

class Config {
 public:
  Config() = default;
  Config(std::string scenario, std::map<std::string, std::string> values)
      : scenario_(std::move(scenario)), values_(std::move(values)) {}

  const std::string& scenario() const { return scenario_; }
  const std::map<std::string, std::string>& values() const { return values_; }
  bool has(const std::string& k) const { return values_.count(k) > 0; }
  const std::string& text(const std::string& k) const {
    const auto it = values_.find(k);
    if (it == values_.end()) throw ConfigError(k, "key not available for scenario " + scenario_);
    return it->second;
  }
  double real(const std::string& k) const {
    double v;
    parse_real(text(k), v);
    return v;
  }
  int integer(const std::string& k) const {
    long v;
    parse_int(text(k), v);
    return int(v);
  }
  bool boolean(const std::string& k) const { return text(k) == "true"; }
  std::vector<double> reals(const std::string& k) const {
    std::vector<double> out;
    for (const auto& item : split_list(text(k))) out.push_back(std::strtod(item.c_str(), nullptr));
    return out;
  }
  std::vector<int> integers(const std::string& k) const {
    std::vector<int> out;
    for (const auto& item : split_list(text(k))) out.push_back(std::atoi(item.c_str()));
    return out;
  }
  /// nullopt when the key holds the word `default`.
  std::optional<double> real_or_default(const std::string& k) const {
    if (text(k) == "default") return std::nullopt;
    return real(k);
  }

  /// Sorted `key = value` lines, scenario first. This is the hashed text.
  std::string canonical() const {
    std::string out = "scenario = " + scenario_ + "\n";
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
  }

 private:
  std::string scenario_;
  std::map<std::string, std::string> values_;
};

inline void check_value(const KeySpec& spec, const std::string& value) {
  auto fail = [&](const std::string& why) { throw ConfigError(spec.name, spec.name + ": " + why + " (got '" + value + "')"); };
  auto in_choices = [&](const std::string& v) {
    return std::find(spec.choices.begin(), spec.choices.end(), v) != spec.choices.end();
  };
  auto check_number = [&](const std::string& item, bool integral) {
    if (in_choices(item)) return;
    double v;
    long n;
    if (integral ? !parse_int(item, n) : !parse_real(item, v)) {
      std::string expect = integral ? "an integer" : "a number";
      for (const auto& c : spec.choices) expect += " or '" + c + "'";
      fail("expected " + expect);
    }
    const double x = integral ? double(n) : v;
    if (x < spec.lo || x > spec.hi) {
      std::ostringstream os;
      os << "must lie in [" << spec.lo << ", " << spec.hi << "]";
      fail(os.str());
    }
  };
  switch (spec.kind) {
    case Kind::real: check_number(value, false); break;
    case Kind::integer: check_number(value, true); break;
    case Kind::reals:
    case Kind::integers: {
      const auto items = split_list(value);
      if (items.empty() || (items.size() == 1 && items[0].empty())) fail("expected a non-empty list");
      for (const auto& item : items) check_number(item, spec.kind == Kind::integers);
      break;
    }
    case Kind::boolean:
      if (value != "true" && value != "false") fail("expected true or false");
      break;
    case Kind::text:
      if (!spec.choices.empty() && !in_choices(value)) {
        std::string expect;
        for (const auto& c : spec.choices) expect += (expect.empty() ? "'" : ", '") + c + "'";
        fail("expected one of " + expect);
      }
      break;
  }
}

/// Applies defaults, rejects keys outside the schema and malformed values.
inline Config resolve(const std::string& scenario, const std::vector<KeySpec>& schema,
                      const std::map<std::string, std::string>& given) {
  std::map<std::string, std::string> values;
  std::set<std::string> known;
  for (const auto& spec : schema) {
    known.insert(spec.name);
    const auto it = given.find(spec.name);
    std::string v = it == given.end() ? spec.fallback : it->second;
    check_value(spec, v);
    if (spec.kind == Kind::reals || spec.kind == Kind::integers) {
      std::string joined;
      for (const auto& item : split_list(v)) joined += (joined.empty() ? "" : ",") + item;
      v = joined;
    }
    values[spec.name] = v;
  }
  for (const auto& [k, v] : given)
    if (!known.count(k)) throw ConfigError(k, "unknown key '" + k + "' for scenario " + scenario);
  return {scenario, values};
}

// ---- hashing ----------------------------------------------------------------

/// SHA-1 of "blob <len>\0<content>", the id `git hash-object` prints.
inline std::string git_blob_sha1(const std::string& content) {
  std::string blob = "blob " + std::to_string(content.size());
  blob.push_back('\0');
  blob += content;
  unsigned char d[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), d);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char c : d) out += {hex[c >> 4], hex[c & 15]};
  return out;
}

// ---- artifacts --------------------------------------------------------------

/// Shortest text that reads back to the same double.
inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char b[32];
  const auto r = std::to_chars(b, b + sizeof b, v);
  return {b, r.ptr};
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  template <class... Ts>
  void add(const Ts&... cells) {
    std::vector<std::string> r;
    (r.push_back(cell(cells)), ...);
    if (r.size() != columns.size()) throw std::logic_error("row width differs from header");
    rows.push_back(std::move(r));
  }
  std::string csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
    out += "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
      out += "\n";
    }
    return out;
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(bool b) { return b ? "true" : "false"; }
  template <class T>
  static std::string cell(const T& v) {
    if constexpr (std::is_integral_v<T>) return std::to_string(v);
    else return num(double(v));
  }
};

inline void write_text(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << content;
  if (!f) throw std::runtime_error("write failed: " + p.string());
}

/// Text grid of a field: `#` header lines, then one node per line,
/// `t x [y] value`, t-major in grid order. NaN marks nodes without a value.
inline std::string field_text(const ExtensionField& F, const std::vector<bool>& mask = {},
                              const std::map<std::string, std::string>& meta = {}) {
  const auto& g = *F.grid();
  const int N = g.order().dim();
  std::string out = "# csxlab-field 1\n";
  out += "# N " + std::to_string(N) + "\n";
  out += "# s " + num(g.order().s()) + "\n";
  out += "# nt " + std::to_string(g.nt()) + "\n";
  out += "# nx " + std::to_string(g.nx()) + "\n";
  for (const auto& [k, v] : meta) out += "# " + k + " " + v + "\n";
  out += N == 1 ? "# columns t x value\n" : "# columns t x y value\n";
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto& x = g.x(k);
    out += num(g.t(k)) + " " + num(x[0]) + " ";
    if (N == 2) out += num(x[1]) + " ";
    out += (mask.empty() || mask[k]) ? num(F[k]) : "nan";
    out += "\n";
  }
  return out;
}

/// Machine-readable failure record.
inline json error_record(const std::string& kind, const std::string& message, const std::string& scenario = {},
                         const std::string& key = {}) {
  json j;
  j["status"] = "error";
  j["kind"] = kind;
  j["message"] = message;
  if (!scenario.empty()) j["scenario"] = scenario;
  if (!key.empty()) j["key"] = key;
  return j;
}

}  // namespace csxlab::cli
