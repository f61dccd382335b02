#pragma once

#include <charconv>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elaine/errors.hpp"
#include "elaine/graph.hpp"

namespace elaine::detail {

inline std::string_view strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  return line.substr(0, hash);
}

inline std::vector<std::string_view> tokenize(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

/// "# nodes: N"
inline std::optional<std::size_t> node_count_directive(std::string_view line) {
  constexpr std::string_view tag = "# nodes:";
  if (line.substr(0, tag.size()) != tag) return std::nullopt;
  auto rest = line.substr(tag.size());
  while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t')) rest.remove_prefix(1);
  std::size_t n = 0;
  const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), n);
  if (ec != std::errc{} || ptr == rest.data()) return std::nullopt;
  return n;
}

inline NodeId parse_node(std::string_view tok, const std::string& source, std::size_t line) {
  NodeId value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || value < 0) {
    throw ParseError(source, line, "invalid id '" + std::string(tok) + "'");
  }
  return value;
}

inline double parse_double(std::string_view tok, const std::string& source, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(source, line, "invalid number '" + std::string(tok) + "'");
  }
  return value;
}

/// Shortest text that round-trips to the same double.
inline std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

/// 17 significant digits, printf-style.
inline std::string format_double17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace elaine::detail
