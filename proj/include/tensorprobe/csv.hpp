#pragma once

#include <charconv>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <system_error>
#include <vector>

namespace tensorprobe {

// Shortest decimal string that round-trips the exact double. Byte-stable
// across runs and thread counts since it depends only on the value.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format_u64(std::uint64_t v) { return std::to_string(v); }

inline void write_delimited_row(std::ostream& os, std::span<const std::string> cells,
                                char delimiter) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << delimiter;
    os << cells[i];
  }
  os << '\n';
}

inline void write_delimited_row(std::ostream& os, std::initializer_list<std::string> cells,
                                char delimiter) {
  write_delimited_row(os, std::span<const std::string>(cells.begin(), cells.size()), delimiter);
}

}  // namespace tensorprobe
