#pragma once

namespace chainlab {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace chainlab
