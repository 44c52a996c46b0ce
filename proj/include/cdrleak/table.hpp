#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cdrleak/error.hpp"

namespace cdrleak {

using Cell = std::variant<double, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

/// 17 significant digits: enough to round-trip any double.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string error_cell(ErrorCode code) { return "ERR:" + std::string(to_string(code)); }

inline bool is_error_cell(const Cell& c) {
  const auto* s = std::get_if<std::string>(&c);
  return s && s->rfind("ERR:", 0) == 0;
}

namespace detail {

inline void write_field(std::ostream& os, std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) {
    os << s;
    return;
  }
  os << '"';
  for (char ch : s) {
    if (ch == '"') os << '"';
    os << ch;
  }
  os << '"';
}

}  // namespace detail

inline void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (i) os << ',';
    detail::write_field(os, t.header[i]);
  }
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      if (const auto* d = std::get_if<double>(&row[i]))
        os << format_number(*d);
      else
        detail::write_field(os, std::get<std::string>(row[i]));
    }
    os << '\n';
  }
}

}  // namespace cdrleak
