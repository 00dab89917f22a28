#include "rdh/partition.hpp"

#include <string>

#include "rdh/error.hpp"

namespace rdh {

PixelClass classify(int width, int height, int row, int col) {
  if (row < 0 || col < 0 || row >= height || col >= width) {
    throw Error("coordinate (" + std::to_string(row) + ", " + std::to_string(col) +
                ") outside " + std::to_string(width) + "x" + std::to_string(height) + " image");
  }
  if (is_border(width, height, {row, col})) return PixelClass::Border;
  return (row + col) % 2 == 0 ? PixelClass::White : PixelClass::Gray;
}

std::vector<Coord> traversal(int width, int height, Pass pass) {
  if (width < 3 || height < 3) {
    throw Error("image too small: " + std::to_string(width) + "x" + std::to_string(height) +
                " has no interior pixels");
  }
  const int parity = pass == Pass::White ? 0 : 1;
  std::vector<Coord> order;
  order.reserve(static_cast<std::size_t>(width - 2) * static_cast<std::size_t>(height - 2) / 2 + 1);
  for (int r = 1; r < height - 1; ++r) {
    for (int c = 1; c < width - 1; ++c) {
      if ((r + c) % 2 == parity) order.push_back({r, c});
    }
  }
  return order;
}

std::vector<Coord> border_sequence(int width, int height) {
  std::vector<Coord> seq;
  if (width <= 0 || height <= 0) return seq;
  for (int c = 0; c < width; ++c) seq.push_back({0, c});
  if (height > 1) {
    for (int c = 0; c < width; ++c) seq.push_back({height - 1, c});
  }
  for (int r = 1; r < height - 1; ++r) seq.push_back({r, 0});
  if (width > 1) {
    for (int r = 1; r < height - 1; ++r) seq.push_back({r, width - 1});
  }
  return seq;
}

}  // namespace rdh
