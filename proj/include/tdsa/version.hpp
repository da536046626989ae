#pragma once

namespace tdsa {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tdsa
