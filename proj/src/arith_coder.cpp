#include "rdh/arith_coder.hpp"

#include <algorithm>
#include <cstdint>

#include "rdh/error.hpp"

namespace rdh {

namespace {

constexpr std::uint64_t kTop = 0xFFFFFFFFULL;
constexpr std::uint64_t kHalf = 0x80000000ULL;
constexpr std::uint64_t kQuarter = 0x40000000ULL;
constexpr std::uint64_t kThreeQuarters = 0xC0000000ULL;
constexpr std::uint32_t kMaxTotal = 1U << 16;

class AdaptiveBit {
 public:
  std::uint32_t zeros() const { return c0_; }
  std::uint32_t total() const { return c0_ + c1_; }
  void update(int bit) {
    (bit ? c1_ : c0_) += 1;
    if (c0_ + c1_ > kMaxTotal) {
      c0_ = (c0_ + 1) / 2;
      c1_ = (c1_ + 1) / 2;
    }
  }

 private:
  std::uint32_t c0_ = 1;
  std::uint32_t c1_ = 1;
};

std::uint64_t split_point(std::uint64_t low, std::uint64_t high, const AdaptiveBit& model) {
  const std::uint64_t range = high - low + 1;
  return low + range * model.zeros() / model.total() - 1;
}

class Encoder {
 public:
  void encode(int bit, const AdaptiveBit& model) {
    const std::uint64_t mid = split_point(low_, high_, model);
    if (bit) {
      low_ = mid + 1;
    } else {
      high_ = mid;
    }
    for (;;) {
      if (high_ < kHalf) {
        emit(0);
      } else if (low_ >= kHalf) {
        emit(1);
        low_ -= kHalf;
        high_ -= kHalf;
      } else if (low_ >= kQuarter && high_ < kThreeQuarters) {
        ++pending_;
        low_ -= kQuarter;
        high_ -= kQuarter;
      } else {
        break;
      }
      low_ = 2 * low_;
      high_ = 2 * high_ + 1;
    }
  }

  Bits finish() && {
    ++pending_;
    emit(low_ < kQuarter ? 0 : 1);
    return std::move(out_);
  }

 private:
  void emit(int bit) {
    out_.push_back(static_cast<std::uint8_t>(bit));
    for (; pending_ > 0; --pending_) out_.push_back(static_cast<std::uint8_t>(!bit));
  }

  std::uint64_t low_ = 0;
  std::uint64_t high_ = kTop;
  std::size_t pending_ = 0;
  Bits out_;
};

class Decoder {
 public:
  explicit Decoder(std::span<const std::uint8_t> in) : in_(in) {
    for (int i = 0; i < 32; ++i) value_ = (value_ << 1) | next();
  }

  int decode(const AdaptiveBit& model) {
    const std::uint64_t mid = split_point(low_, high_, model);
    int bit;
    if (value_ <= mid) {
      bit = 0;
      high_ = mid;
    } else {
      bit = 1;
      low_ = mid + 1;
    }
    for (;;) {
      if (high_ < kHalf) {
        // no offset
      } else if (low_ >= kHalf) {
        low_ -= kHalf;
        high_ -= kHalf;
        value_ -= kHalf;
      } else if (low_ >= kQuarter && high_ < kThreeQuarters) {
        low_ -= kQuarter;
        high_ -= kQuarter;
        value_ -= kQuarter;
      } else {
        break;
      }
      low_ = 2 * low_;
      high_ = 2 * high_ + 1;
      value_ = 2 * value_ + next();
    }
    return bit;
  }

 private:
  std::uint64_t next() { return pos_ < in_.size() ? (in_[pos_++] & 1U) : (++pos_, 0U); }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  std::uint64_t low_ = 0;
  std::uint64_t high_ = kTop;
  std::uint64_t value_ = 0;
};

}  // namespace

Bits compress_map(std::span<const std::uint8_t> bits) {
  if (bits.empty()) return {};
  Encoder enc;
  AdaptiveBit model;
  for (std::uint8_t b : bits) {
    const int bit = b ? 1 : 0;
    enc.encode(bit, model);
    model.update(bit);
  }
  return std::move(enc).finish();
}

Bits decompress_map(std::span<const std::uint8_t> compressed, std::size_t raw_length) {
  if (raw_length == 0) {
    if (!compressed.empty()) throw Error("location map: data present for an empty map");
    return {};
  }
  Decoder dec(compressed);
  AdaptiveBit model;
  Bits out;
  out.reserve(raw_length);
  for (std::size_t i = 0; i < raw_length; ++i) {
    const int bit = dec.decode(model);
    model.update(bit);
    out.push_back(static_cast<std::uint8_t>(bit));
  }
  const Bits check = compress_map(out);
  if (!std::equal(check.begin(), check.end(), compressed.begin(), compressed.end())) {
    throw Error("location map: compressed stream does not match declared length");
  }
  return out;
}

}  // namespace rdh
