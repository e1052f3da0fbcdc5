#pragma once

#include <charconv>
#include <string>

namespace mobsim {

// Locale-independent float formatting ('.' decimal separator always).

inline std::string format_fixed(double v, int precision) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v,
                                         std::chars_format::fixed, precision);
    return std::string(buf, ptr);
}

inline std::string format_shortest(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace mobsim
