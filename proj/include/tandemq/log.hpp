// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdlib>
#include <iostream>
#include <string>
#include <string_view>

namespace tandemq {

enum class LogLevel { error = 0, info = 1, debug = 2 };

/// Verbosity is controlled by the TANDEM_LOG environment variable
/// (error | info | debug); unset or unrecognized means error-only.
inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("TANDEM_LOG");
        if (env == nullptr) return LogLevel::error;
        std::string_view v(env);
        if (v == "debug") return LogLevel::debug;
        if (v == "info") return LogLevel::info;
        return LogLevel::error;
    }();
    return level;
}

inline void log_error(const std::string& msg) {
    std::cerr << "[tandemq] error: " << msg << '\n';
}

inline void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::info) std::cerr << "[tandemq] " << msg << '\n';
}

inline void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::debug) std::cerr << "[tandemq] debug: " << msg << '\n';
}

}  // namespace tandemq
