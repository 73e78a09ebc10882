#pragma once

#include <string_view>

namespace smcheck {

/// Embedded in every result file; keep in step with the CMake project version.
inline constexpr std::string_view version = "0.1.0";

} // namespace smcheck
