#pragma once

namespace twolaw {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace twolaw
