#pragma once

#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "vecctl/params.hpp"

namespace vecctl {

struct KeyValueLine {
  std::size_t number = 0;
  std::string section;  // empty before the first [section] header
  std::string key;
  std::string value;
};

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

/// Splits `key = value` lines grouped under optional `[section]` headers.
/// Blank lines and `#` comments are skipped.
inline std::vector<KeyValueLine> split_key_values(std::string_view text) {
  std::vector<KeyValueLine> out;
  std::string section;
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ValidationError("line " + std::to_string(number) + ": malformed section header");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("line " + std::to_string(number) + ": expected 'key = value'");
    }
    KeyValueLine kv;
    kv.number = number;
    kv.section = section;
    kv.key = std::string(trim(line.substr(0, eq)));
    kv.value = std::string(trim(line.substr(eq + 1)));
    if (kv.key.empty()) throw ValidationError("line " + std::to_string(number) + ": empty key");
    out.push_back(std::move(kv));
  }
  return out;
}

inline double parse_double(std::string_view text, std::size_t line, std::string_view key) {
  text = trim(text);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ValidationError("line " + std::to_string(line) + ": key '" + std::string(key) +
                          "' expects a number, got '" + std::string(text) + "'");
  }
  return value;
}

/// Comma-separated list of numbers; an empty value is an empty list.
inline std::vector<double> parse_double_list(std::string_view text, std::size_t line,
                                             std::string_view key) {
  std::vector<double> out;
  text = trim(text);
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(parse_double(text.substr(0, comma), line, key));
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return out;
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

inline std::string format_double_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

}  // namespace vecctl
