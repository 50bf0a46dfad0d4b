// Apache License, Version 2.0, refer to LICENSE.txt
#include "aggcorrect/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "aggcorrect/error.hpp"

namespace aggcorrect {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void config_fail(const std::string& origin, int line,
                              const std::string& message) {
  std::ostringstream msg;
  msg << origin << ":" << line << ": " << message;
  fail(ErrorKind::InvalidConfig, msg.str());
}

bool valid_key(const std::string& key) {
  if (key.empty()) {
    return false;
  }
  return std::all_of(key.begin(), key.end(), [](unsigned char c) {
    return std::isalnum(c) != 0 || c == '_' || c == '-';
  });
}

double parse_number(const std::string& token, const std::string& origin,
                    int line) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    config_fail(origin, line, "expected a number, got '" + token + "'");
  }
  if (used != token.size() || !std::isfinite(value)) {
    config_fail(origin, line, "expected a number, got '" + token + "'");
  }
  return value;
}

// Splits an array body on commas; no nesting, strings must not contain
// commas or quotes.
std::vector<std::string> split_array_body(const std::string& body,
                                          const std::string& origin,
                                          int line) {
  std::vector<std::string> items;
  std::string current;
  bool in_string = false;
  for (const char c : body) {
    if (c == '"') {
      in_string = !in_string;
      current += c;
    } else if (c == ',' && !in_string) {
      items.push_back(trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (in_string) {
    config_fail(origin, line, "unterminated string in array");
  }
  const std::string last = trim(current);
  if (!last.empty()) {
    items.push_back(last);
  }
  for (const auto& item : items) {
    if (item.empty()) {
      config_fail(origin, line, "empty array element");
    }
  }
  return items;
}

}  // namespace

ConfigDocument ConfigDocument::parse_string(const std::string& text,
                                            const std::string& origin) {
  ConfigDocument doc;
  doc.origin_ = origin;
  std::istringstream stream(text);
  std::string raw_line;
  int line_no = 0;
  while (std::getline(stream, raw_line)) {
    ++line_no;
    // Strip comments outside of strings.
    std::string line;
    bool in_string = false;
    for (const char c : raw_line) {
      if (c == '"') {
        in_string = !in_string;
      }
      if (c == '#' && !in_string) {
        break;
      }
      line += c;
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      config_fail(origin, line_no, "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value_text = trim(line.substr(eq + 1));
    if (!valid_key(key)) {
      config_fail(origin, line_no, "invalid key '" + key + "'");
    }
    if (doc.values_.count(key) != 0) {
      config_fail(origin, line_no, "duplicate key '" + key + "'");
    }
    if (value_text.empty()) {
      config_fail(origin, line_no, "missing value for '" + key + "'");
    }

    Value value;
    if (value_text == "true" || value_text == "false") {
      value = (value_text == "true");
    } else if (value_text.front() == '"') {
      if (value_text.size() < 2 || value_text.back() != '"') {
        config_fail(origin, line_no, "unterminated string");
      }
      value = value_text.substr(1, value_text.size() - 2);
    } else if (value_text.front() == '[') {
      if (value_text.back() != ']') {
        config_fail(origin, line_no, "unterminated array");
      }
      const auto items = split_array_body(
          value_text.substr(1, value_text.size() - 2), origin, line_no);
      if (items.empty()) {
        config_fail(origin, line_no, "empty arrays are not allowed");
      }
      if (items.front().front() == '"') {
        std::vector<std::string> strings;
        for (const auto& item : items) {
          if (item.size() < 2 || item.front() != '"' || item.back() != '"') {
            config_fail(origin, line_no, "mixed or malformed string array");
          }
          strings.push_back(item.substr(1, item.size() - 2));
        }
        value = std::move(strings);
      } else {
        std::vector<double> numbers;
        for (const auto& item : items) {
          numbers.push_back(parse_number(item, origin, line_no));
        }
        value = std::move(numbers);
      }
    } else {
      value = parse_number(value_text, origin, line_no);
    }
    doc.values_.emplace(key, std::move(value));
  }
  return doc;
}

ConfigDocument ConfigDocument::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorKind::IoFailure, "cannot open config file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str(), path);
}

bool ConfigDocument::has(const std::string& key) const {
  return values_.count(key) != 0;
}

const ConfigDocument::Value* ConfigDocument::find(
    const std::string& key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

bool ConfigDocument::get_bool(const std::string& key, bool fallback) const {
  const Value* v = find(key);
  if (v == nullptr) {
    return fallback;
  }
  if (const bool* b = std::get_if<bool>(v)) {
    return *b;
  }
  fail(ErrorKind::InvalidConfig, origin_ + ": '" + key + "' must be a boolean");
}

double ConfigDocument::get_double(const std::string& key,
                                  double fallback) const {
  const Value* v = find(key);
  if (v == nullptr) {
    return fallback;
  }
  if (const double* d = std::get_if<double>(v)) {
    return *d;
  }
  fail(ErrorKind::InvalidConfig, origin_ + ": '" + key + "' must be a number");
}

std::int64_t ConfigDocument::get_int(const std::string& key,
                                     std::int64_t fallback) const {
  const Value* v = find(key);
  if (v == nullptr) {
    return fallback;
  }
  if (const double* d = std::get_if<double>(v)) {
    if (*d == std::floor(*d)) {
      return static_cast<std::int64_t>(*d);
    }
  }
  fail(ErrorKind::InvalidConfig, origin_ + ": '" + key + "' must be an integer");
}

std::string ConfigDocument::get_string(const std::string& key,
                                       const std::string& fallback) const {
  const Value* v = find(key);
  if (v == nullptr) {
    return fallback;
  }
  if (const std::string* s = std::get_if<std::string>(v)) {
    return *s;
  }
  fail(ErrorKind::InvalidConfig, origin_ + ": '" + key + "' must be a string");
}

double ConfigDocument::require_double(const std::string& key) const {
  if (!has(key)) {
    fail(ErrorKind::InvalidConfig, origin_ + ": missing key '" + key + "'");
  }
  return get_double(key, 0.0);
}

std::int64_t ConfigDocument::require_int(const std::string& key) const {
  if (!has(key)) {
    fail(ErrorKind::InvalidConfig, origin_ + ": missing key '" + key + "'");
  }
  return get_int(key, 0);
}

std::string ConfigDocument::require_string(const std::string& key) const {
  if (!has(key)) {
    fail(ErrorKind::InvalidConfig, origin_ + ": missing key '" + key + "'");
  }
  return get_string(key, "");
}

std::optional<std::vector<double>> ConfigDocument::get_double_array(
    const std::string& key) const {
  const Value* v = find(key);
  if (v == nullptr) {
    return std::nullopt;
  }
  if (const auto* a = std::get_if<std::vector<double>>(v)) {
    return *a;
  }
  fail(ErrorKind::InvalidConfig,
       origin_ + ": '" + key + "' must be a numeric array");
}

std::optional<std::vector<std::string>> ConfigDocument::get_string_array(
    const std::string& key) const {
  const Value* v = find(key);
  if (v == nullptr) {
    return std::nullopt;
  }
  if (const auto* a = std::get_if<std::vector<std::string>>(v)) {
    return *a;
  }
  fail(ErrorKind::InvalidConfig,
       origin_ + ": '" + key + "' must be a string array");
}

std::vector<double> ConfigDocument::require_double_array(
    const std::string& key) const {
  const auto a = get_double_array(key);
  if (!a) {
    fail(ErrorKind::InvalidConfig, origin_ + ": missing key '" + key + "'");
  }
  return *a;
}

std::vector<std::string> ConfigDocument::require_string_array(
    const std::string& key) const {
  const auto a = get_string_array(key);
  if (!a) {
    fail(ErrorKind::InvalidConfig, origin_ + ": missing key '" + key + "'");
  }
  return *a;
}

void ConfigDocument::restrict_keys(
    const std::vector<std::string>& allowed) const {
  for (const auto& [key, value] : values_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(ErrorKind::InvalidConfig, origin_ + ": unknown key '" + key + "'");
    }
  }
}

}  // namespace aggcorrect
