#pragma once

#include <charconv>
#include <string>

namespace geomprod {

/// 17 significant digits, independent of the C locale.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace geomprod
