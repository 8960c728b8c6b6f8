#pragma once

namespace freqmux {
inline constexpr const char* kVersion = "0.1.0";
}
