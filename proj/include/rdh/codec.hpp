#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rdh/bitstream.hpp"
#include "rdh/histogram.hpp"
#include "rdh/image.hpp"
#include "rdh/partition.hpp"
#include "rdh/predictor.hpp"

namespace rdh {

// Marked-image layout
// -------------------
// The overhead occupies the LSBs of the first kOverheadBits pixels of
// border_sequence(), MSB first:
//
//   version      8   kFormatVersion
//   flags        8   bit 0: payload carries a CRC-32 trailer
//   predictor    8   PredictorKind
//   n            8   context size
//   radius       8   training window radius
//   gamma       32   IEEE-754 binary32 bit pattern
//   white record 84  threshold 16, b_neg 10, b_pos 10, map bits 24, payload bits 24
//   gray record  84  same fields for the gray pass
//
// Bins are stored as value + 512 in 10 bits; 1023 marks an unused side.
// The white pass stream is [displaced border LSBs][payload share][map share],
// the gray pass stream is [payload share][map share]. Bits are carried by the
// bin pixels of each pass in raster order; surplus bin pixels carry 0.

inline constexpr std::uint8_t kFormatVersion = 1;
inline constexpr int kRecordBits = 16 + 10 + 10 + 24 + 24;
inline constexpr int kOverheadBits = 8 + 8 + 8 + 8 + 8 + 32 + 2 * kRecordBits;
inline constexpr int kChecksumBits = 32;

struct LocationMap {
  /// One bit per pixel of the preprocessed image equal to 1 or 254, raster
  /// order over the whole image: 1 when the pixel was moved off 0 or 255.
  Bits bits;
};

struct Preprocessed {
  GrayImage image;
  LocationMap map;
};

/// Moves 0 -> 1 and 255 -> 254, recording the moves in the location map.
Preprocessed preprocess(const GrayImage& cover);
/// Inverse of preprocess. Throws rdh::Error when the map length does not
/// match the number of 1/254 pixels.
GrayImage postprocess(const GrayImage& preprocessed, const LocationMap& map);

struct OverheadRecord {
  int threshold = 0;
  BinPair bins;
  std::uint32_t map_bits = 0;
  std::uint32_t payload_bits = 0;
  bool operator==(const OverheadRecord&) const = default;
};

struct Overhead {
  std::uint8_t version = kFormatVersion;
  bool checksum = true;
  PredictorConfig predictor;
  OverheadRecord white;
  OverheadRecord gray;
};

Bits encode_overhead(const Overhead& overhead);
/// Throws FormatError on an unknown version or out-of-range field.
Overhead decode_overhead(std::span<const std::uint8_t> bits);

struct EmbedConfig {
  PredictorConfig predictor;
  bool checksum = true;
  bool pixel_selection = true;  // false: every pass pixel participates (plain dynamic shifting)
  std::optional<int> threshold_max;
};

struct PassReport {
  EmbedPlan plan;
  std::size_t payload_bits = 0;
  std::size_t map_bits = 0;
  std::size_t stream_bits = 0;
  std::size_t participating = 0;
};

struct EmbedResult {
  GrayImage marked;
  PassReport white;
  PassReport gray;
  std::size_t location_map_bits = 0;
  std::size_t compressed_map_bits = 0;
  double psnr = kInfinitePsnr;
};

struct ExtractResult {
  Bits payload;
  GrayImage restored;
  Overhead overhead;
};

/// Per-pass record of participating pixels, used to check that extraction
/// reproduces every embed-time prediction.
struct PassTrace {
  std::vector<Coord> coords;
  std::vector<int> predictions;
  std::vector<int> smoothness;
};

struct CodecTrace {
  PassTrace white;
  PassTrace gray;
};

/// Embeds `payload` (one bit per element) into `cover`. Throws CapacityError
/// when the payload, location map and overhead do not fit.
EmbedResult embed(const GrayImage& cover, std::span<const std::uint8_t> payload,
                  const EmbedConfig& config, CodecTrace* trace = nullptr);

/// Recovers the payload and the exact cover. Throws FormatError for images
/// that do not decode, ChecksumError when the CRC trailer does not match.
ExtractResult extract(const GrayImage& marked, CodecTrace* trace = nullptr);

/// Payload capacity in bits measured with an empty payload. The true maximum
/// can differ slightly because gray-pass errors depend on the white-pass data.
std::size_t estimate_capacity(const GrayImage& cover, const EmbedConfig& config);

}  // namespace rdh
