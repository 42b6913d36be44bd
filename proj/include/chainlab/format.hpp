#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace chainlab {

// %.17g: round-trip exact for 64-bit floats and byte-stable across runs.
std::string format_g17(double value);

std::uint64_t fnv1a64(std::string_view bytes);
std::string content_digest(std::string_view bytes);  // fnv1a64 as 16 hex chars

}  // namespace chainlab
