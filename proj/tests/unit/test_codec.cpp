#include <doctest.h>

#include <cmath>
#include <random>

#include "rdh/bench.hpp"
#include "rdh/codec.hpp"
#include "rdh/error.hpp"
#include "rdh/selection.hpp"
#include "support/synthetic.hpp"

using namespace rdh;

namespace {

EmbedConfig small_config() {
  EmbedConfig c;
  c.predictor.train_radius = 4;
  return c;
}

void check_roundtrip(const GrayImage& cover, const Bits& payload, const EmbedConfig& cfg) {
  const auto res = embed(cover, payload, cfg);
  const auto out = extract(res.marked);
  CHECK(out.payload == payload);
  CHECK(out.restored == cover);
}

}  // namespace

TEST_CASE("preprocess and postprocess") {
  GrayImage img(4, 3, 100);
  img.at(0, 0) = 0;
  img.at(1, 2) = 255;
  img.at(2, 3) = 254;
  img.at(2, 1) = 1;
  const auto pre = preprocess(img);
  CHECK(pre.image.at(0, 0) == 1);
  CHECK(pre.image.at(1, 2) == 254);
  CHECK(pre.map.bits == Bits{1, 1, 0, 0});  // raster order: (0,0) (1,2) (2,1) (2,3)
  CHECK(postprocess(pre.image, pre.map) == img);

  const GrayImage mild(3, 3, 1);
  const auto pm = preprocess(mild);
  CHECK(pm.image == mild);
  CHECK(pm.map.bits == Bits(9, 0));

  CHECK_THROWS_AS(postprocess(pre.image, LocationMap{Bits{1}}), Error);
  CHECK_THROWS_AS(postprocess(pre.image, LocationMap{Bits(5, 0)}), Error);
}

TEST_CASE("overhead encoding") {
  Overhead o;
  o.checksum = false;
  o.predictor = {PredictorKind::GAP, 7, 3, 0.5};
  o.white = {12, {-3, 2}, 1234, 99};
  o.gray = {765, {std::nullopt, 0}, 0, (1u << 24) - 1};
  const auto bits = encode_overhead(o);
  CHECK(bits.size() == static_cast<std::size_t>(kOverheadBits));
  const auto back = decode_overhead(bits);
  CHECK(back.version == kFormatVersion);
  CHECK_FALSE(back.checksum);
  CHECK(back.predictor.kind == PredictorKind::GAP);
  CHECK(back.predictor.context_size == 7);
  CHECK(back.predictor.train_radius == 3);
  CHECK(back.predictor.gamma == 0.5);
  CHECK(back.white == o.white);
  CHECK(back.gray == o.gray);

  auto bad = bits;
  bad[0] ^= 1;  // version
  CHECK_THROWS_AS(decode_overhead(bad), FormatError);
  CHECK_THROWS_AS(decode_overhead(std::span(bits).first(100)), FormatError);
  o.white.payload_bits = 1u << 24;
  CHECK_THROWS_AS(encode_overhead(o), Error);
}

TEST_CASE("round trips") {
  std::mt19937_64 rng(17);
  const auto cfg = small_config();

  SUBCASE("textured covers and varied payloads") {
    for (int i = 0; i < 4; ++i) {
      const auto cover = testing::textured_image(64 + 8 * i, 64, rng, 3);
      for (std::size_t n : {0, 1, 100, 350}) check_roundtrip(cover, random_bits(n, 100 + n + i), cfg);
    }
  }
  SUBCASE("saturated covers") {
    check_roundtrip(GrayImage(64, 64, 0), random_bits(500, 1), cfg);
    check_roundtrip(GrayImage(64, 64, 255), random_bits(500, 2), cfg);
    check_roundtrip(testing::salt_and_pepper_image(64, 64, rng, 0.05), random_bits(200, 3), cfg);
  }
  SUBCASE("gradients and every predictor") {
    for (auto kind : {PredictorKind::MED, PredictorKind::GAP, PredictorKind::LS, PredictorKind::WLS}) {
      auto c = cfg;
      c.predictor.kind = kind;
      check_roundtrip(testing::gradient_image(70, 62, 0.2 + static_cast<int>(kind)), random_bits(300, 9), c);
    }
  }
  SUBCASE("without checksum or pixel selection") {
    auto c = cfg;
    c.checksum = false;
    c.pixel_selection = false;
    check_roundtrip(testing::textured_image(64, 64, rng), random_bits(400, 5), c);
  }
}

TEST_CASE("extraction reproduces every embed-time prediction") {
  std::mt19937_64 rng(23);
  const auto cover = testing::textured_image(72, 68, rng, 5);
  CodecTrace enc, dec;
  const auto res = embed(cover, random_bits(300, 4), small_config(), &enc);
  extract(res.marked, &dec);
  CHECK(enc.white.coords == dec.white.coords);
  CHECK(enc.white.predictions == dec.white.predictions);
  CHECK(enc.white.smoothness == dec.white.smoothness);
  CHECK(enc.gray.coords == dec.gray.coords);
  CHECK(enc.gray.predictions == dec.gray.predictions);
  CHECK(enc.gray.smoothness == dec.gray.smoothness);
  CHECK(!enc.white.coords.empty());
}

TEST_CASE("distortion bounds") {
  std::mt19937_64 rng(29);
  const auto cover = testing::salt_and_pepper_image(80, 64, rng, 0.02);
  const auto pre = preprocess(cover).image;
  const auto res = embed(cover, random_bits(800, 8), small_config());
  for (int r = 0; r < 64; ++r) {
    for (int c = 0; c < 80; ++c) {
      const int d = std::abs(res.marked.at(r, c) - pre.at(r, c));
      if (is_border(80, 64, {r, c})) {
        CHECK((res.marked.at(r, c) >> 1) == (pre.at(r, c) >> 1));
      } else {
        CHECK(d <= 1);
      }
    }
  }
}

TEST_CASE("zero payload only carries the displaced border bits") {
  std::mt19937_64 rng(31);
  const auto cover = testing::textured_image(64, 64, rng);
  auto cfg = small_config();
  cfg.checksum = false;
  const auto res = embed(cover, {}, cfg);
  CHECK(res.white.payload_bits == 0);
  CHECK(res.white.stream_bits == static_cast<std::size_t>(kOverheadBits));
  CHECK(res.gray.stream_bits == 0);
  CHECK(res.gray.plan.modified_pixels == 0);
  CHECK(std::isfinite(res.psnr));
  for (const auto& c : traversal(64, 64, Pass::Gray)) CHECK(res.marked.at(c.row, c.col) == cover.at(c.row, c.col));
  const auto out = extract(res.marked);
  CHECK(out.payload.empty());
  CHECK(out.restored == cover);
}

TEST_CASE("capacity limits") {
  CHECK_THROWS_AS(embed(GrayImage(40, 40, 100), random_bits(10, 1), {}), CapacityError);
  CHECK_THROWS_AS(embed(GrayImage(2, 80, 100), {}, {}), CapacityError);

  const GrayImage flat(64, 64, 120);
  const auto cap = estimate_capacity(flat, small_config());
  CHECK(cap > 1000);
  try {
    embed(flat, random_bits(5000, 2), small_config());
    FAIL("expected CapacityError");
  } catch (const CapacityError& e) {
    CHECK(e.max_payload_bits() > 0);
    CHECK(e.max_payload_bits() < 5000);
  }
}

TEST_CASE("tampering never restores the cover silently") {
  std::mt19937_64 rng(37);
  const auto cover = testing::textured_image(64, 64, rng, 3);
  const auto payload = random_bits(500, 12);
  const auto res = embed(cover, payload, small_config());
  int trials = 0;
  for (int k = 0; k < 30; ++k) {
    GrayImage bad = res.marked;
    const int r = 1 + (k * 7) % 62, c = 1 + (k * 13) % 62;
    bad.at(r, c) = static_cast<std::uint8_t>(std::min(255, bad.at(r, c) + 3));
    if (bad == res.marked) continue;
    ++trials;
    try {
      const auto out = extract(bad);
      CHECK(out.restored != cover);  // never a silent successful restoration
    } catch (const ChecksumError&) {
    } catch (const FormatError&) {
    }
  }
  CHECK(trials > 0);
}

TEST_CASE("images without a valid overhead are rejected") {
  std::mt19937_64 rng(41);
  CHECK_THROWS_AS(extract(testing::uniform_noise_image(64, 64, rng)), FormatError);
  CHECK_THROWS_AS(extract(GrayImage(64, 64, 0)), FormatError);
}
