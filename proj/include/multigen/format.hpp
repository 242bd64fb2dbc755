#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace multigen {

/// Shortest-form decimal with at most 9 significant digits. Locale independent.
inline std::string format_sig9(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
  return std::string(buf, end);
}

/// Fixed-point decimal with `digits` fractional digits. Locale independent.
inline void append_fixed(std::string& out, double v, int digits) {
  char buf[64];
  if (v == 0.0) v = 0.0;  // folds -0
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  std::string_view s(buf, static_cast<std::size_t>(end - buf));
  if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string_view::npos) s.remove_prefix(1);
  out.append(s);
}

inline std::string format_fixed(double v, int digits) {
  std::string out;
  append_fixed(out, v, digits);
  return out;
}

}  // namespace multigen
