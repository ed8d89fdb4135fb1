#pragma once

namespace chirpmix {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace chirpmix
