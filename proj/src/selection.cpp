#include "rdh/selection.hpp"

#include <cstdlib>

#include "rdh/error.hpp"

namespace rdh {

int smoothness(const GrayImage& image, Coord at) {
  if (at.row < 1 || at.col < 1 || at.row > image.height() - 2 || at.col > image.width() - 2) {
    throw Error("smoothness is defined for interior pixels only");
  }
  const int n = image.at(at.row - 1, at.col);
  const int e = image.at(at.row, at.col + 1);
  const int s = image.at(at.row + 1, at.col);
  const int w = image.at(at.row, at.col - 1);
  return std::abs(n - e) + std::abs(e - s) + std::abs(s - w);
}

std::vector<int> smoothness_map(const GrayImage& image, std::span<const Coord> pixels) {
  std::vector<int> out;
  out.reserve(pixels.size());
  for (const auto& c : pixels) out.push_back(smoothness(image, c));
  return out;
}

}  // namespace rdh
