#pragma once

namespace dlss {

inline constexpr const char* version = "0.1.0";

} // namespace dlss
