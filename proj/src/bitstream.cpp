#include "rdh/bitstream.hpp"

#include <zlib.h>

#include <algorithm>

#include "rdh/error.hpp"

namespace rdh {

void BitWriter::put(std::uint64_t value, int width) {
  for (int i = width - 1; i >= 0; --i) bits_.push_back(static_cast<std::uint8_t>((value >> i) & 1U));
}

std::uint64_t BitReader::get(int width) {
  if (remaining() < static_cast<std::size_t>(width)) throw Error("bitstream overrun");
  std::uint64_t value = 0;
  for (int i = 0; i < width; ++i) value = (value << 1) | (bits_[pos_++] & 1U);
  return value;
}

int BitReader::get_bit() { return static_cast<int>(get(1)); }

std::string pack_bits(std::span<const std::uint8_t> bits) {
  std::string out((bits.size() + 7) / 8, '\0');
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out[i / 8] = static_cast<char>(out[i / 8] | (0x80 >> (i % 8)));
  }
  return out;
}

Bits unpack_bits(std::string_view bytes) { return unpack_bits(bytes, bytes.size() * 8); }

Bits unpack_bits(std::string_view bytes, std::size_t count) {
  if (count > bytes.size() * 8) throw Error("not enough bytes to unpack");
  Bits bits(count);
  for (std::size_t i = 0; i < count; ++i) {
    bits[i] = static_cast<std::uint8_t>((static_cast<unsigned char>(bytes[i / 8]) >> (7 - i % 8)) & 1U);
  }
  return bits;
}

std::uint32_t payload_checksum(std::span<const std::uint8_t> bits) {
  std::string data = pack_bits(bits);
  const auto n = static_cast<std::uint32_t>(bits.size());
  for (int shift = 24; shift >= 0; shift -= 8) data.push_back(static_cast<char>((n >> shift) & 0xFF));
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size()));
  return static_cast<std::uint32_t>(crc);
}

std::size_t popcount(std::span<const std::uint8_t> bits) {
  return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
}

}  // namespace rdh
