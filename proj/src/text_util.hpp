#pragma once

#include <fmt/format.h>

#include <charconv>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace qsdc::detail {

inline std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

// Non-empty lines with any trailing '\r' removed.
inline std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Locale-independent full-field number parse; returns false on any junk.
template <typename T>
bool try_parse(std::string_view field, T& value) {
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  return ec == std::errc() && ptr == end && !field.empty();
}

template <typename T>
T parse_or_throw(std::string_view field, std::string_view what) {
  T value{};
  if (!try_parse(field, value)) {
    throw std::runtime_error(fmt::format("{}: bad number '{}'", what, field));
  }
  return value;
}

}  // namespace qsdc::detail
