#pragma once

namespace rtstat {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rtstat
