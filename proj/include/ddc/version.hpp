#pragma once

namespace ddc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ddc
