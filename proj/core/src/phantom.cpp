#include "cgei/phantom.hpp"

#include <algorithm>
#include <cmath>

namespace cgei {

namespace {

int scaled(int extent, double fraction) {
  return static_cast<int>(std::lround(fraction * (extent - 1)));
}

}  // namespace

Image rectangle_phantom(int rows, int cols, int r0, int c0, int r1, int c1) {
  Grid g(rows, cols);
  if (r0 < 0 || c0 < 0 || r1 >= rows || c1 >= cols || r0 > r1 || c0 > c1)
    throw Error("rectangle outside the image");
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) g(r, c) = 1.0;
  return Image(std::move(g));
}

Image nested_rectangles_phantom(int rows, int cols) {
  Grid g(rows, cols);
  struct Layer {
    double lo, hi, value;
  };
  for (const Layer& layer : {Layer{0.15, 0.85, 0.3}, Layer{0.3, 0.7, 0.6}, Layer{0.42, 0.58, 1.0}}) {
    for (int r = scaled(rows, layer.lo); r <= scaled(rows, layer.hi); ++r)
      for (int c = scaled(cols, layer.lo); c <= scaled(cols, layer.hi); ++c) g(r, c) = layer.value;
  }
  return Image(std::move(g));
}

namespace {

Grid shapes(int rows, int cols, double rect, double disk, double tri) {
  Grid g(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const double y = (r + 0.5) / rows;
    for (int c = 0; c < cols; ++c) {
      const double x = (c + 0.5) / cols;
      if (y >= 0.12 && y <= 0.42 && x >= 0.1 && x <= 0.45) g(r, c) = rect;
      const double dy = y - 0.32;
      const double dx = x - 0.72;
      if (dx * dx + dy * dy <= 0.17 * 0.17) g(r, c) = disk;
      // right triangle with legs along the bottom and left sides of its box
      const double u = (x - 0.2) / 0.6;
      const double v = (0.88 - y) / 0.33;
      if (u >= 0.0 && v >= 0.0 && u + v <= 1.0) g(r, c) = tri;
    }
  }
  return g;
}

}  // namespace

Image shapes_phantom(int rows, int cols) { return Image(shapes(rows, cols, 1.0, 1.0, 1.0)); }

Image gray_shapes_phantom(int rows, int cols) {
  Grid g = shapes(rows, cols, 0.55, 0.8, 1.0);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (g(r, c) == 0.0) g(r, c) = 0.1 + 0.1 * c / std::max(1, cols - 1);
  return Image(std::move(g));
}

Image cross_phantom(int rows, int cols) {
  Grid g(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const bool in_bar_v = c >= scaled(cols, 0.375) && c <= scaled(cols, 0.625) &&
                            r >= scaled(rows, 0.125) && r <= scaled(rows, 0.875);
      const bool in_bar_h = r >= scaled(rows, 0.375) && r <= scaled(rows, 0.625) &&
                            c >= scaled(cols, 0.125) && c <= scaled(cols, 0.875);
      if (in_bar_v || in_bar_h) g(r, c) = 1.0;
    }
  }
  return Image(std::move(g));
}

Image make_phantom(const std::string& name, int rows, int cols) {
  if (name == "rect")
    return rectangle_phantom(rows, cols, scaled(rows, 0.25), scaled(cols, 0.25),
                             scaled(rows, 0.75), scaled(cols, 0.75));
  if (name == "nested") return nested_rectangles_phantom(rows, cols);
  if (name == "shapes") return shapes_phantom(rows, cols);
  if (name == "gray_shapes") return gray_shapes_phantom(rows, cols);
  if (name == "cross") return cross_phantom(rows, cols);
  throw Error("unknown phantom: " + name);
}

std::vector<std::string> phantom_names() {
  return {"rect", "nested", "shapes", "gray_shapes", "cross"};
}

}  // namespace cgei
