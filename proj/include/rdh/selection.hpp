#pragma once

#include <span>
#include <vector>

#include "rdh/image.hpp"
#include "rdh/partition.hpp"

namespace rdh {

/// Local smoothness of an interior pixel: |N - E| + |E - S| + |S - W| over its
/// four 4-neighbours taken clockwise. The 4-neighbours always belong to the
/// other pass (or the border), so the score is stable across embed/extract.
int smoothness(const GrayImage& image, Coord at);

/// Largest value smoothness() can return for 8-bit pixels.
inline constexpr int kMaxSmoothness = 3 * 255;

std::vector<int> smoothness_map(const GrayImage& image, std::span<const Coord> pixels);

}  // namespace rdh
