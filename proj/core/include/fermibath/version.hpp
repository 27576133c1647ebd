#pragma once

namespace fermibath {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fermibath
