#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace exsample {

// Raised for malformed files, missing keys, or values of the wrong shape.
// The CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Sectioned key/value text:
//   [section]
//   key = value   # trailing comments with '#' or ';'
// Keys are unique per section; later duplicates are errors.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const;
  std::int64_t get_int(const std::string& section, const std::string& key) const;
  std::int64_t get_int_or(const std::string& section, const std::string& key,
                          std::int64_t fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key,
                       double fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key,
                   bool fallback) const;

  // Comma-separated lists.
  std::vector<std::string> get_list(const std::string& section,
                                    const std::string& key) const;
  std::vector<double> get_double_list(const std::string& section,
                                      const std::string& key) const;
  std::vector<std::uint64_t> get_uint_list(const std::string& section,
                                           const std::string& key) const;

  // All key/value pairs of one section, insertion order not preserved.
  const std::map<std::string, std::string>& section(
      const std::string& name) const;

 private:
  std::optional<std::string> lookup(const std::string& section,
                                    const std::string& key) const;

  std::map<std::string, std::map<std::string, std::string>> sections_;
  static const std::map<std::string, std::string> kEmpty;
};

}  // namespace exsample
