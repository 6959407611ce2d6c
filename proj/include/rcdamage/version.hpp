#pragma once

namespace rcdamage {
inline constexpr const char *version = "0.1.0";
} // namespace rcdamage
