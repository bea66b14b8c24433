#pragma once

namespace lipfree {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lipfree
