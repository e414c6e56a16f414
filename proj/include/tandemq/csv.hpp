// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <system_error>

namespace tandemq {

/// Shortest round-trip decimal representation of a double ('.' decimal
/// separator, no locale). Used everywhere a number enters a CSV cell so
/// emitted files are byte-stable across runs.
inline std::string format_double(double value) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

inline std::string format_int(std::int64_t value) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

}  // namespace tandemq
