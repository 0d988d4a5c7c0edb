#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cgei {

/// Base exception for every recoverable error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major grid of doubles. Row index is the first coordinate (x_i),
/// column index the second (y_j).
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, double fill = 0.0);
  Grid(int rows, int cols, std::vector<double> values);
  static Grid from_rows(const std::vector<std::vector<double>>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(int r, int c) { return data_[index(r, c)]; }
  double operator()(int r, int c) const { return data_[index(r, c)]; }

  /// Access with periodic wrap of both coordinates.
  double wrapped(int r, int c) const;

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double min() const;
  double max() const;
  double sum() const;

  bool same_shape(const Grid& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Signed single-direction response (Sobel channel, directional difference,
/// correlation map). Distinct from EdgeMap only by convention.
using SignedMap = Grid;

/// Grayscale object or reconstruction: at least 3x3, finite, values in [0, 1].
class Image : public Grid {
 public:
  Image() = default;
  explicit Image(Grid g);
  Image(int rows, int cols, double fill = 0.0) : Image(Grid(rows, cols, fill)) {}
};

/// Nonnegative edge-strength map.
class EdgeMap : public Grid {
 public:
  EdgeMap() = default;
  explicit EdgeMap(Grid g);
};

enum class ShiftMode {
  kPeriodic,    ///< circular wrap
  kMasterCrop,  ///< crop window of an (m+2)x(n+2) master canvas
};

std::string to_string(ShiftMode mode);
ShiftMode parse_shift_mode(const std::string& text);

/// shift(g, dx, dy)(a, b) = g(a + dx, b + dy) with periodic wrap.
/// MASTER_CROP has no meaning for a bare grid and throws "no master canvas";
/// use crop_shift on the master instead.
Grid shift(const Grid& g, int dx, int dy, ShiftMode mode);

/// Crop of an (m+2)x(n+2) master canvas: result(a, b) = master(a + 1 + dx, b + 1 + dy).
Grid crop_shift(const Grid& master, int dx, int dy);

struct SobelChannels {
  SignedMap horizontal;
  SignedMap vertical;
  EdgeMap magnitude;
};

/// Sobel response of `img`. Out-of-frame neighbours wrap under PERIODIC and
/// read as zero (opaque surround) under MASTER_CROP.
///   h(x,y) = T(x-1,y-1) + 2T(x-1,y) + T(x-1,y+1) - T(x+1,y-1) - 2T(x+1,y) - T(x+1,y+1)
///   v(x,y) = T(x-1,y-1) + 2T(x,y-1) + T(x+1,y-1) - T(x-1,y+1) - 2T(x,y+1) - T(x+1,y+1)
SobelChannels sobel_reference(const Grid& img, ShiftMode mode = ShiftMode::kPeriodic);

struct Offset {
  int dx = 0;
  int dy = 0;
  friend bool operator==(const Offset&, const Offset&) = default;
};

/// Unit offset (round(cos phi), round(sin phi)) for phi a multiple of 45 in [0, 315].
Offset gradient_offset(int phi_degrees);

/// D_phi T(p) = T(p + d) - T(p), d = gradient_offset(phi).
SignedMap gradient_reference(const Grid& img, int phi_degrees,
                             ShiftMode mode = ShiftMode::kPeriodic);

/// Elementwise sqrt(h^2 + v^2).
EdgeMap magnitude(const SignedMap& h, const SignedMap& v);
/// Elementwise |x|.
EdgeMap magnitude(const SignedMap& x);

/// Min-max rescale to [0, 1]; a constant map becomes all zeros.
Image normalize_map(const Grid& map);

}  // namespace cgei
