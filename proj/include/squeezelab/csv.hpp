#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace squeezelab {

/// 15 significant digits, shortest general form, independent of locale.
/// Negative zero prints as "0".
inline std::string format_number(double v) {
  if (v == 0.0) v = 0.0;
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 15);
  return std::string(buf, res.ptr);
}

/// Header line plus one line per row, LF endings.
inline void write_csv(std::ostream& out, std::string_view first_column,
                      const std::vector<std::string>& labels, const std::vector<double>& params,
                      const std::vector<std::vector<double>>& columns) {
  out << first_column;
  for (const auto& l : labels) out << ',' << l;
  out << '\n';
  for (std::size_t r = 0; r < params.size(); ++r) {
    out << format_number(params[r]);
    for (const auto& col : columns) out << ',' << format_number(col[r]);
    out << '\n';
  }
}

}  // namespace squeezelab
