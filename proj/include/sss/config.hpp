#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sss/errors.hpp"

namespace sss {

// Flat key = value configuration text. One assignment per line; values are
// bare tokens, quoted strings, or [a, b, c] arrays; `#` starts a comment.
// Later assignments override earlier ones, which is how CLI flags and
// profile defaults compose.
class Config {
 public:
  static Config parse(const std::string& text) {
    Config cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const std::string stripped = strip_comment(line);
      const std::string trimmed = trim(stripped);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw ConfigError("line " + std::to_string(lineno) +
                          ": expected key = value");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty())
        throw ConfigError("line " + std::to_string(lineno) + ": empty key");
      cfg.values_[key] = parse_value(value, lineno);
    }
    return cfg;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  // Merge other on top of this (other wins).
  void override_with(const Config& other) {
    for (const auto& [k, v] : other.values_) values_[k] = v;
  }

  void set(const std::string& key, const std::string& value) {
    values_[key] = {value};
  }

  std::string get_string(const std::string& key,
                         const std::string& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second.size() != 1)
      throw ConfigError(key + ": expected a scalar");
    return it->second[0];
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return to_double(key, scalar(it));
  }

  std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const double d = to_double(key, scalar(it));
    const auto v = static_cast<std::int64_t>(d);
    if (static_cast<double>(v) != d)
      throw ConfigError(key + ": expected an integer");
    return v;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& s = scalar(it);
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    throw ConfigError(key + ": expected a boolean");
  }

  std::vector<std::string> get_list(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return {};
    return it->second;
  }

  std::vector<double> get_doubles(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : get_list(key)) out.push_back(to_double(key, s));
    return out;
  }

  const std::map<std::string, std::vector<std::string>>& entries() const {
    return values_;
  }

 private:
  static std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
  }

  static std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
  }

  static std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
      return s.substr(1, s.size() - 2);
    return s;
  }

  static std::vector<std::string> parse_value(const std::string& value,
                                              int lineno) {
    if (value.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty value");
    if (value.front() == '[') {
      if (value.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) +
                          ": unterminated array");
      std::vector<std::string> out;
      std::string inner = value.substr(1, value.size() - 2);
      std::size_t start = 0;
      while (start <= inner.size()) {
        auto comma = inner.find(',', start);
        if (comma == std::string::npos) comma = inner.size();
        const std::string tok = trim(inner.substr(start, comma - start));
        if (!tok.empty()) out.push_back(unquote(tok));
        start = comma + 1;
      }
      return out;
    }
    return {unquote(value)};
  }

  static const std::string& scalar(
      std::map<std::string, std::vector<std::string>>::const_iterator it) {
    if (it->second.size() != 1)
      throw ConfigError(it->first + ": expected a scalar");
    return it->second[0];
  }

  static double to_double(const std::string& key, const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
      throw ConfigError(key + ": cannot parse number from '" + s + "'");
    return v;
  }

  std::map<std::string, std::vector<std::string>> values_;
};

}  // namespace sss
