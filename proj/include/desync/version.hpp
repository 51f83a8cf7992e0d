#pragma once

namespace desync {

inline constexpr const char* kVersion = "0.1.0";

} // namespace desync
