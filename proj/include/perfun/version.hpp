#pragma once

namespace perfun {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace perfun
