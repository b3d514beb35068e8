#include "exsample/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace exsample {

const std::map<std::string, std::string> Config::kEmpty;

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string strip_comment(const std::string& s) {
  auto pos = s.find_first_of("#;");
  return pos == std::string::npos ? s : s.substr(0, pos);
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::string current;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(lineno, "unterminated section header");
      current = trim(s.substr(1, s.size() - 2));
      if (current.empty()) fail(lineno, "empty section name");
      cfg.sections_[current];
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos) fail(lineno, "expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) fail(lineno, "empty key");
    if (current.empty()) fail(lineno, "key outside any [section]");
    auto& sect = cfg.sections_[current];
    if (sect.count(key)) fail(lineno, "duplicate key '" + key + "'");
    sect[key] = value;
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<std::string> Config::lookup(const std::string& section,
                                          const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

bool Config::has(const std::string& section, const std::string& key) const {
  return lookup(section, key).has_value();
}

std::string Config::get_string(const std::string& section,
                               const std::string& key) const {
  auto v = lookup(section, key);
  if (!v) throw ConfigError("missing [" + section + "] " + key);
  return *v;
}

std::string Config::get_string_or(const std::string& section,
                                  const std::string& key,
                                  const std::string& fallback) const {
  auto v = lookup(section, key);
  return v ? *v : fallback;
}

std::int64_t Config::get_int(const std::string& section,
                             const std::string& key) const {
  std::string v = get_string(section, key);
  char* end = nullptr;
  long long out = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("[" + section + "] " + key + ": not an integer: " + v);
  return out;
}

std::int64_t Config::get_int_or(const std::string& section,
                                const std::string& key,
                                std::int64_t fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

double Config::get_double(const std::string& section,
                          const std::string& key) const {
  std::string v = get_string(section, key);
  char* end = nullptr;
  double out = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("[" + section + "] " + key + ": not a number: " + v);
  return out;
}

double Config::get_double_or(const std::string& section, const std::string& key,
                             double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

bool Config::get_bool_or(const std::string& section, const std::string& key,
                         bool fallback) const {
  if (!has(section, key)) return fallback;
  std::string v = get_string(section, key);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("[" + section + "] " + key + ": not a boolean: " + v);
}

std::vector<std::string> Config::get_list(const std::string& section,
                                          const std::string& key) const {
  std::string v = get_string(section, key);
  std::vector<std::string> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty())
    throw ConfigError("[" + section + "] " + key + ": empty list");
  return out;
}

std::vector<double> Config::get_double_list(const std::string& section,
                                            const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : get_list(section, key)) {
    char* end = nullptr;
    double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0')
      throw ConfigError("[" + section + "] " + key + ": not a number: " + item);
    out.push_back(v);
  }
  return out;
}

std::vector<std::uint64_t> Config::get_uint_list(const std::string& section,
                                                 const std::string& key) const {
  std::vector<std::uint64_t> out;
  for (const auto& item : get_list(section, key)) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(item.c_str(), &end, 10);
    if (end == item.c_str() || *end != '\0')
      throw ConfigError("[" + section + "] " + key +
                        ": not a nonnegative integer: " + item);
    out.push_back(v);
  }
  return out;
}

const std::map<std::string, std::string>& Config::section(
    const std::string& name) const {
  auto s = sections_.find(name);
  return s == sections_.end() ? kEmpty : s->second;
}

}  // namespace exsample
