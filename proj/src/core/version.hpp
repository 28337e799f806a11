#pragma once

namespace rfim {

inline constexpr const char* kProjectName = "rfim-lab";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace rfim
