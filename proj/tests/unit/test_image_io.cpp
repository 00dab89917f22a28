#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "rdh/error.hpp"
#include "rdh/image.hpp"

using namespace rdh;

namespace {

PgmErrorKind kind_of(std::string_view bytes) {
  try {
    parse_pgm(bytes);
  } catch (const PgmError& e) {
    return e.kind();
  }
  FAIL("expected a parse error");
  return PgmErrorKind::Io;
}

std::filesystem::path temp_path(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("2x2 P5 maps bytes directly") {
  const std::string file = std::string("P5\n2 2\n255\n") + std::string("\x00\x80\xff\x07", 4);
  const GrayImage img = parse_pgm(file);
  CHECK(img.width() == 2);
  CHECK(img.height() == 2);
  CHECK(img == GrayImage(2, 2, {0, 128, 255, 7}));
}

TEST_CASE("header comments are skipped") {
  const std::string file = std::string("P5\n# made by hand\n2 # width\n1\n# maxval next\n255\n") + "ab";
  const GrayImage img = parse_pgm(file);
  CHECK(img.at(0, 0) == 'a');
  CHECK(img.at(0, 1) == 'b');
}

TEST_CASE("parse errors are distinct") {
  CHECK(kind_of("P2\n2 2\n255\n0 1 2 3\n") == PgmErrorKind::Unsupported);
  CHECK(kind_of("P6\n1 1\n255\nabc") == PgmErrorKind::Unsupported);
  CHECK(kind_of("GIF89a") == PgmErrorKind::BadMagic);
  CHECK(kind_of("") == PgmErrorKind::BadMagic);
  CHECK(kind_of("P5\n2 x\n255\n") == PgmErrorKind::MalformedHeader);
  CHECK(kind_of("P5\n0 2\n255\n") == PgmErrorKind::MalformedHeader);
  CHECK(kind_of("P5\n2 2\n65535\n") == PgmErrorKind::BadMaxval);
  CHECK(kind_of("P5\n2 2\n15\n") == PgmErrorKind::BadMaxval);
  CHECK(kind_of(std::string("P5\n2 2\n255\n") + "abc") == PgmErrorKind::Truncated);
}

TEST_CASE("P2 reports unsupported format") {
  try {
    parse_pgm("P2\n1 1\n255\n7\n");
    FAIL("no throw");
  } catch (const PgmError& e) {
    CHECK(std::string(e.what()).find("unsupported format") != std::string::npos);
  }
}

TEST_CASE("write then read is the identity") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dim(1, 40);
  std::uniform_int_distribution<int> px(0, 255);
  const auto path = temp_path("rdh_io_roundtrip.pgm");
  for (int trial = 0; trial < 25; ++trial) {
    GrayImage img(dim(rng), dim(rng));
    for (auto& v : img.pixels()) v = static_cast<std::uint8_t>(px(rng));
    write_pgm(img, path);
    CHECK(read_pgm(path) == img);
  }
  std::filesystem::remove(path);
}

TEST_CASE("file sizes") {
  const auto path = temp_path("rdh_io_size.pgm");
  write_pgm(GrayImage(1, 1, 0), path);
  CHECK(std::filesystem::file_size(path) == 12);  // "P5\n1 1\n255\n" + 1
  CHECK(read_pgm(path) == GrayImage(1, 1, 0));

  write_pgm(GrayImage(512, 512, 9), path);
  CHECK(std::filesystem::file_size(path) == std::string("P5\n512 512\n255\n").size() + 262144);
  std::filesystem::remove(path);
}

TEST_CASE("missing file is an I/O error") {
  try {
    read_pgm(temp_path("rdh_definitely_missing.pgm"));
    FAIL("no throw");
  } catch (const PgmError& e) {
    CHECK(e.kind() == PgmErrorKind::Io);
  }
}

TEST_CASE("GrayImage rejects inconsistent buffers") {
  CHECK_THROWS_AS(GrayImage(2, 2, std::vector<std::uint8_t>(3)), Error);
  CHECK_THROWS_AS(GrayImage(0, 2), Error);
}
