#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rdh {

/// One bit per element, each 0 or 1.
using Bits = std::vector<std::uint8_t>;

class BitWriter {
 public:
  void put(std::uint64_t value, int width);  // MSB first
  void put_bit(int bit) { bits_.push_back(bit ? 1 : 0); }
  void append(std::span<const std::uint8_t> bits) { bits_.insert(bits_.end(), bits.begin(), bits.end()); }
  const Bits& bits() const noexcept { return bits_; }
  Bits take() && { return std::move(bits_); }

 private:
  Bits bits_;
};

/// Throws rdh::Error on reads past the end.
class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bits) : bits_(bits) {}
  std::uint64_t get(int width);
  int get_bit();
  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bits_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bits_;
  std::size_t pos_ = 0;
};

/// MSB-first packing; the final byte is zero-padded.
std::string pack_bits(std::span<const std::uint8_t> bits);
Bits unpack_bits(std::string_view bytes);
Bits unpack_bits(std::string_view bytes, std::size_t count);

/// CRC-32 over the packed payload followed by its bit length (32-bit BE).
std::uint32_t payload_checksum(std::span<const std::uint8_t> bits);

std::size_t popcount(std::span<const std::uint8_t> bits);

}  // namespace rdh
