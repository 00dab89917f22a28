#include "rdh/image.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

#include "rdh/error.hpp"

namespace rdh {

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw Error("image dimensions must be positive");
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width <= 0 || height <= 0) throw Error("image dimensions must be positive");
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error("pixel buffer does not match image dimensions");
  }
}

namespace {

class HeaderCursor {
 public:
  explicit HeaderCursor(std::string_view bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  long number(const char* field) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) {
        throw PgmError(PgmErrorKind::MalformedHeader, std::string("PGM ") + field + " out of range");
      }
      ++pos_;
    }
    if (pos_ == start) {
      throw PgmError(PgmErrorKind::MalformedHeader, std::string("PGM header: missing ") + field);
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw PgmError(PgmErrorKind::MalformedHeader, "PGM header: expected whitespace after maxval");
    }
    ++pos_;
  }

  std::size_t position() const { return pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 2;
};

}  // namespace

GrayImage parse_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') {
    throw PgmError(PgmErrorKind::BadMagic, "not a PNM file (bad magic)");
  }
  if (bytes[1] != '5') {
    if (bytes[1] >= '1' && bytes[1] <= '7') {
      throw PgmError(PgmErrorKind::Unsupported,
                     std::string("unsupported format P") + bytes[1] + " (only binary P5 is supported)");
    }
    throw PgmError(PgmErrorKind::BadMagic, "not a PNM file (bad magic)");
  }

  HeaderCursor cursor(bytes);
  const long width = cursor.number("width");
  const long height = cursor.number("height");
  const long maxval = cursor.number("maxval");
  if (width <= 0 || height <= 0) {
    throw PgmError(PgmErrorKind::MalformedHeader, "PGM header: zero dimension");
  }
  if (maxval != 255) {
    throw PgmError(PgmErrorKind::BadMaxval,
                   "unsupported maxval " + std::to_string(maxval) + " (only 255 is supported)");
  }
  cursor.single_whitespace();

  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t offset = cursor.position();
  if (bytes.size() - offset < count) {
    throw PgmError(PgmErrorKind::Truncated, "truncated PGM: expected " + std::to_string(count) +
                                                " pixel bytes, found " +
                                                std::to_string(bytes.size() - offset));
  }
  const auto* first = reinterpret_cast<const std::uint8_t*>(bytes.data() + offset);
  return GrayImage(static_cast<int>(width), static_cast<int>(height),
                   std::vector<std::uint8_t>(first, first + count));
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PgmError(PgmErrorKind::Io, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw PgmError(PgmErrorKind::Io, "read error on " + path.string());
  return parse_pgm(bytes);
}

std::string encode_pgm(const GrayImage& image) {
  std::string out = "P5\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) +
                    "\n255\n";
  const auto px = image.pixels();
  out.append(reinterpret_cast<const char*>(px.data()), px.size());
  return out;
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path) {
  const std::string bytes = encode_pgm(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PgmError(PgmErrorKind::Io, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw PgmError(PgmErrorKind::Io, "write error on " + path.string());
}

}  // namespace rdh
