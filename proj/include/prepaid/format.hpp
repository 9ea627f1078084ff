#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace prepaid {

/// Shortest text that parses back to exactly `value`.
inline std::string format_number(double value)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

/// `value` to `digits` significant figures (printf %g).
inline std::string format_significant(double value, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    std::string out(buf);
    return out == "-0" ? "0" : out;
}

}  // namespace prepaid
