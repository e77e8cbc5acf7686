#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace mgseir {

/// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    if (res.ec != std::errc{}) return "nan";
    return std::string(buf, res.ptr);
}

/// Fixed 17 significant digits, used for every CSV field.
inline std::string format_double17(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (res.ec != std::errc{}) return "nan";
    return std::string(buf, res.ptr);
}

}  // namespace mgseir
