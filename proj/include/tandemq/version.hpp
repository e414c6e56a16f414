// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace tandemq {

inline constexpr const char* version_string = "tandemq 0.1.0";

}  // namespace tandemq
