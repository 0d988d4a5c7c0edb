#pragma once

#include <string>
#include <vector>

#include "cgei/image.hpp"

namespace cgei {

// Synthetic test objects. All are deterministic and scale with the requested
// size so the same geometry is available at 8x8, 32x32, 64x64 and 128x128.

/// Filled axis-aligned rectangle of value 1 on zero background, corners inclusive.
Image rectangle_phantom(int rows, int cols, int r0, int c0, int r1, int c1);

/// Three nested rectangles at 0.3 / 0.6 / 1.0 on zero background.
Image nested_rectangles_phantom(int rows, int cols);

/// Binary scene with a rectangle, a disk and a right triangle.
Image shapes_phantom(int rows, int cols);

/// `shapes_phantom` with per-shape gray levels and a faint linear ramp background.
Image gray_shapes_phantom(int rows, int cols);

/// Binary plus-sign glyph.
Image cross_phantom(int rows, int cols);

/// Looks up a phantom by name: rect, nested, shapes, gray_shapes, cross.
Image make_phantom(const std::string& name, int rows, int cols);

std::vector<std::string> phantom_names();

}  // namespace cgei
