#pragma once

namespace sace {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sace
