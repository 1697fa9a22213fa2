#pragma once

namespace ridges {

inline constexpr const char* kVersion = "0.1.0";

} // namespace ridges
