#pragma once

namespace eitmc {
inline constexpr const char* kVersion = "0.1.0";
}
