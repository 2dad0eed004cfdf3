#pragma once

namespace ican {

inline constexpr const char* kToolVersion = "ican-sim 0.1.0";

}  // namespace ican
