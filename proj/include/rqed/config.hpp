#pragma once

// Flat `key = value` configuration files. '#' and ';' start comments; keys are
// lowercase dotted names such as `atom.gamma` or `sweep.points`.

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rqed {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char ch : k) {
    if (!((ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '_' || ch == '.')) return false;
  }
  return true;
}

}  // namespace detail

class Config {
 public:
  Config() = default;

  static Config parse(std::istream& in, const std::string& origin = "<config>") {
    Config c;
    c.origin_ = origin;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      const auto cut = raw.find_first_of("#;");
      const std::string body = detail::trim(cut == std::string::npos ? raw : raw.substr(0, cut));
      if (body.empty()) continue;
      const auto eq = body.find('=');
      if (eq == std::string::npos) throw ConfigError(c.where(line) + "expected 'key = value'");
      const std::string key = detail::trim(body.substr(0, eq));
      const std::string value = detail::trim(body.substr(eq + 1));
      if (!detail::valid_key(key)) throw ConfigError(c.where(line) + "invalid key '" + key + "'");
      if (value.empty()) throw ConfigError(c.where(line) + "empty value for '" + key + "'");
      if (c.values_.count(key)) {
        throw ConfigError(c.where(line) + "duplicate key '" + key + "' (first set on line " +
                          std::to_string(c.lines_.at(key)) + ")");
      }
      c.values_[key] = value;
      c.lines_[key] = line;
    }
    return c;
  }

  static Config parse_string(const std::string& text, const std::string& origin = "<config>") {
    std::istringstream in(text);
    return parse(in, origin);
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    return parse(in, path);
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& origin() const { return origin_; }

  const std::string& get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(origin_ + ": missing required key '" + key + "'");
    return it->second;
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
  }

  double get_double(const std::string& key) const { return to_double(key, get_string(key)); }
  double get_double(const std::string& key, double fallback) const { return has(key) ? get_double(key) : fallback; }

  long get_int(const std::string& key) const {
    const std::string& v = get_string(key);
    long out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) throw bad_value(key, "an integer");
    return out;
  }
  long get_int(const std::string& key, long fallback) const { return has(key) ? get_int(key) : fallback; }

  bool get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = get_string(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw bad_value(key, "a boolean");
  }

  std::vector<std::string> get_list(const std::string& key) const {
    std::vector<std::string> out;
    std::stringstream ss(get_string(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = detail::trim(item);
      if (item.empty()) throw bad_value(key, "a comma-separated list without empty items");
      out.push_back(item);
    }
    return out;
  }

  /// Rejects keys not in `allowed`, pointing at the offending line.
  void check_keys(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : values_) {
      if (!allowed.count(k)) throw ConfigError(where(lines_.at(k)) + "unknown key '" + k + "'");
    }
  }

  ConfigError bad_value(const std::string& key, const std::string& expected) const {
    const auto it = lines_.find(key);
    const std::string loc = it == lines_.end() ? origin_ + ": " : where(it->second);
    return ConfigError(loc + "key '" + key + "' expects " + expected);
  }

  int line_of(const std::string& key) const {
    const auto it = lines_.find(key);
    return it == lines_.end() ? 0 : it->second;
  }

 private:
  std::string where(int line) const { return origin_ + ":" + std::to_string(line) + ": "; }

  double to_double(const std::string& key, const std::string& v) const {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) throw bad_value(key, "a number");
    return out;
  }

  std::string origin_;
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
};

}  // namespace rqed
