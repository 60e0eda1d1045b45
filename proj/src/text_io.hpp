#pragma once

// Line-oriented helpers shared by the model persistence code.

#include <cstdint>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "coincast/errors.hpp"
#include "coincast/numeric_text.hpp"

namespace coincast::textio {

inline std::string next_line(std::istream& in, const std::string& context) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) return line;
  }
  throw ParseError(context + ": unexpected end of model file");
}

/// Reads "<key> <rest>" and returns <rest>.
inline std::string expect(std::istream& in, const std::string& key) {
  const std::string line = next_line(in, key);
  const std::string_view t = trim(line);
  if (!(t.starts_with(key) && (t.size() == key.size() || t[key.size()] == ' ')))
    throw ParseError("expected '" + key + "' in model file, got '" + std::string(t) + "'");
  return std::string(trim(t.substr(key.size())));
}

inline double to_double(const std::string& s, const std::string& key) {
  const auto v = parse_double(trim(s));
  if (!v) throw ParseError("bad number for '" + key + "': '" + s + "'");
  return *v;
}

inline std::uint64_t to_uint(const std::string& s, const std::string& key) {
  std::uint64_t v = 0;
  std::istringstream is(s);
  if (!(is >> v) || !is.eof()) throw ParseError("bad integer for '" + key + "': '" + s + "'");
  return v;
}

inline double read_double(std::istream& in, const std::string& key) { return to_double(expect(in, key), key); }
inline std::uint64_t read_uint(std::istream& in, const std::string& key) { return to_uint(expect(in, key), key); }

inline std::vector<double> to_doubles(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(to_double(tok, key));
  return out;
}

inline std::string join(const Eigen::Ref<const Eigen::VectorXd>& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += format_double(v[i]);
  }
  return s;
}

inline Eigen::VectorXd read_vector(std::istream& in, const std::string& key, Eigen::Index expected) {
  const auto vals = to_doubles(expect(in, key), key);
  if (static_cast<Eigen::Index>(vals.size()) != expected)
    throw ParseError("'" + key + "' expects " + std::to_string(expected) + " values, got " +
                     std::to_string(vals.size()));
  return Eigen::Map<const Eigen::VectorXd>(vals.data(), expected);
}

}  // namespace coincast::textio
