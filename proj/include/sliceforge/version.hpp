#pragma once

namespace sliceforge {
inline constexpr const char* kVersion = "0.1.0";
}  // namespace sliceforge
