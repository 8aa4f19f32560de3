#pragma once

namespace duffgrape {
inline constexpr const char* kVersion = "0.1.0";
}
