#pragma once

#include <cstddef>
#include <span>

#include "rdh/bitstream.hpp"

namespace rdh {

// Adaptive binary arithmetic coder used for the overflow location map.
//
// Frozen format: one adaptive context with counts starting at (1, 1) and
// incremented after every symbol; when the total exceeds 2^16 both counts
// are halved (rounding up). The interval is 32 bits wide with the classic
// E1/E2/E3 renormalisation; symbol 0 takes the lower part of the interval,
// [low, low + range * c0 / total - 1]. Termination emits one disambiguating
// bit plus pending bits. The decoder reads zeros past the end of input.
// An empty input encodes to an empty output.

Bits compress_map(std::span<const std::uint8_t> bits);

/// Decodes exactly `raw_length` symbols. Throws rdh::Error if `compressed` is
/// not precisely the encoding of the decoded sequence, which catches a wrong
/// declared length.
Bits decompress_map(std::span<const std::uint8_t> compressed, std::size_t raw_length);

}  // namespace rdh
