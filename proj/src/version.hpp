#pragma once

namespace dpvi {
inline constexpr const char kVersion[] = "0.1.0";
}
