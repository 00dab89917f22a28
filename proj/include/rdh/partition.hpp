#pragma once

#include <compare>
#include <cstddef>
#include <vector>

namespace rdh {

struct Coord {
  int row = 0;
  int col = 0;
  auto operator<=>(const Coord&) const = default;
};

enum class PixelClass { Border, White, Gray };

/// The two embedding passes. White is embedded first and extracted last.
enum class Pass { White, Gray };

/// Border for the outermost rows/columns; interior pixels form a checkerboard
/// with White where row+col is even.
PixelClass classify(int width, int height, int row, int col);

inline bool is_border(int width, int height, Coord c) {
  return c.row == 0 || c.col == 0 || c.row == height - 1 || c.col == width - 1;
}

inline PixelClass pass_class(Pass pass) {
  return pass == Pass::White ? PixelClass::White : PixelClass::Gray;
}

/// Raster-order list of the interior pixels belonging to `pass`.
/// Throws rdh::Error when the image has no interior (width or height < 3).
std::vector<Coord> traversal(int width, int height, Pass pass);

/// Border pixels in the order the overhead channel uses them: first row,
/// last row, then first column and last column without the corners.
std::vector<Coord> border_sequence(int width, int height);

}  // namespace rdh
