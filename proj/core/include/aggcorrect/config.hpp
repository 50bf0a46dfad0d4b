// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace aggcorrect {

/** Flat typed key-value configuration document.
 *
 * The accepted syntax is a flat subset of TOML: one `key = value` pair per
 * line, `#` comments, and values that are booleans, numbers, double-quoted
 * strings, or arrays of numbers/strings. Consumers validate against a fixed
 * schema; unknown keys are rejected so typos fail loudly.
 */
class ConfigDocument {
 public:
  using Value = std::variant<bool, double, std::string, std::vector<double>,
                             std::vector<std::string>>;

  static ConfigDocument parse_file(const std::string& path);
  static ConfigDocument parse_string(const std::string& text,
                                     const std::string& origin = "<string>");

  bool has(const std::string& key) const;

  bool get_bool(const std::string& key, bool fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;

  double require_double(const std::string& key) const;
  std::int64_t require_int(const std::string& key) const;
  std::string require_string(const std::string& key) const;
  std::vector<double> require_double_array(const std::string& key) const;
  std::vector<std::string> require_string_array(const std::string& key) const;

  std::optional<std::vector<double>> get_double_array(
      const std::string& key) const;
  std::optional<std::vector<std::string>> get_string_array(
      const std::string& key) const;

  /// Throws InvalidConfig when the document contains a key outside `allowed`.
  void restrict_keys(const std::vector<std::string>& allowed) const;

 private:
  const Value* find(const std::string& key) const;
  std::map<std::string, Value> values_;
  std::string origin_;
};

}  // namespace aggcorrect
