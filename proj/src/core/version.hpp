#pragma once

namespace survkit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace survkit
