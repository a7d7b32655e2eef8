#pragma once

namespace kdemode {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace kdemode
