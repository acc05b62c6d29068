#pragma once

namespace limitnls {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace limitnls
