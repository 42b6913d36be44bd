#pragma once

#include <cstdint>

namespace chainlab {

// Reserved derive_stream indexes for non-replication draws. Replications
// use indexes n_index * R + r, far below these tags.
inline constexpr std::uint64_t kMetricSampleStream = 0x8000000000000001ULL;
inline constexpr std::uint64_t kHeldOutOracleStream = 0x8000000000000002ULL;
inline constexpr std::uint64_t kWidthStream = 0x8000000000000003ULL;
inline constexpr std::uint64_t kSigmaStream = 0x8000000000000004ULL;

}  // namespace chainlab
