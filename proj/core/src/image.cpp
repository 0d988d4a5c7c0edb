#include "cgei/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cgei {

namespace {

int wrap(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

// Neighbour accessor honouring the boundary convention of sobel_reference.
double neighbour(const Grid& g, int r, int c, ShiftMode mode) {
  if (mode == ShiftMode::kPeriodic) return g.wrapped(r, c);
  if (r < 0 || c < 0 || r >= g.rows() || c >= g.cols()) return 0.0;
  return g(r, c);
}

}  // namespace

Grid::Grid(int rows, int cols, double fill) : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) throw Error("grid dimensions must be positive");
  data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill);
}

Grid::Grid(int rows, int cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (rows <= 0 || cols <= 0) throw Error("grid dimensions must be positive");
  if (data_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw Error("grid value count does not match dimensions");
}

Grid Grid::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) throw Error("grid dimensions must be positive");
  const auto n = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * n);
  for (const auto& row : rows) {
    if (row.size() != n) throw Error("ragged grid rows");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Grid(static_cast<int>(rows.size()), static_cast<int>(n), std::move(values));
}

double Grid::wrapped(int r, int c) const {
  return data_[index(wrap(r, rows_), wrap(c, cols_))];
}

double Grid::min() const { return *std::min_element(data_.begin(), data_.end()); }
double Grid::max() const { return *std::max_element(data_.begin(), data_.end()); }
double Grid::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

Image::Image(Grid g) : Grid(std::move(g)) {
  if (rows() < 3 || cols() < 3) throw Error("image must be at least 3x3");
  for (double v : values()) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw Error("image values must be finite and within [0, 1]");
  }
}

EdgeMap::EdgeMap(Grid g) : Grid(std::move(g)) {
  for (double v : values()) {
    if (!std::isfinite(v) || v < 0.0) throw Error("edge map values must be finite and >= 0");
  }
}

std::string to_string(ShiftMode mode) {
  return mode == ShiftMode::kPeriodic ? "periodic" : "master_crop";
}

ShiftMode parse_shift_mode(const std::string& text) {
  if (text == "periodic") return ShiftMode::kPeriodic;
  if (text == "master_crop") return ShiftMode::kMasterCrop;
  throw Error("unknown shift mode: " + text);
}

Grid shift(const Grid& g, int dx, int dy, ShiftMode mode) {
  if (mode == ShiftMode::kMasterCrop) throw Error("no master canvas");
  Grid out(g.rows(), g.cols());
  for (int r = 0; r < g.rows(); ++r)
    for (int c = 0; c < g.cols(); ++c) out(r, c) = g.wrapped(r + dx, c + dy);
  return out;
}

Grid crop_shift(const Grid& master, int dx, int dy) {
  const int rows = master.rows() - 2;
  const int cols = master.cols() - 2;
  if (rows < 1 || cols < 1) throw Error("master canvas too small");
  if (std::abs(dx) > 1 || std::abs(dy) > 1) throw Error("crop offset outside master canvas");
  Grid out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out(r, c) = master(r + 1 + dx, c + 1 + dy);
  return out;
}

SobelChannels sobel_reference(const Grid& img, ShiftMode mode) {
  SignedMap h(img.rows(), img.cols());
  SignedMap v(img.rows(), img.cols());
  for (int x = 0; x < img.rows(); ++x) {
    for (int y = 0; y < img.cols(); ++y) {
      auto t = [&](int dx, int dy) { return neighbour(img, x + dx, y + dy, mode); };
      h(x, y) = (t(-1, -1) + 2.0 * t(-1, 0) + t(-1, 1)) - (t(1, -1) + 2.0 * t(1, 0) + t(1, 1));
      v(x, y) = (t(-1, -1) + 2.0 * t(0, -1) + t(1, -1)) - (t(-1, 1) + 2.0 * t(0, 1) + t(1, 1));
    }
  }
  EdgeMap mag = magnitude(h, v);
  return {std::move(h), std::move(v), std::move(mag)};
}

Offset gradient_offset(int phi_degrees) {
  switch (phi_degrees) {
    case 0: return {1, 0};
    case 45: return {1, 1};
    case 90: return {0, 1};
    case 135: return {-1, 1};
    case 180: return {-1, 0};
    case 225: return {-1, -1};
    case 270: return {0, -1};
    case 315: return {1, -1};
    default: throw Error("unsupported gradient angle " + std::to_string(phi_degrees) +
                         " (expected a multiple of 45 in [0, 315])");
  }
}

SignedMap gradient_reference(const Grid& img, int phi_degrees, ShiftMode mode) {
  const Offset d = gradient_offset(phi_degrees);
  SignedMap out(img.rows(), img.cols());
  for (int x = 0; x < img.rows(); ++x)
    for (int y = 0; y < img.cols(); ++y)
      out(x, y) = neighbour(img, x + d.dx, y + d.dy, mode) - img(x, y);
  return out;
}

EdgeMap magnitude(const SignedMap& h, const SignedMap& v) {
  if (!h.same_shape(v)) throw Error("channel shapes differ");
  Grid out(h.rows(), h.cols());
  auto hv = h.values();
  auto vv = v.values();
  auto ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = std::sqrt(hv[i] * hv[i] + vv[i] * vv[i]);
  return EdgeMap(std::move(out));
}

EdgeMap magnitude(const SignedMap& x) {
  Grid out(x.rows(), x.cols());
  auto xv = x.values();
  auto ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = std::abs(xv[i]);
  return EdgeMap(std::move(out));
}

Image normalize_map(const Grid& map) {
  const double lo = map.min();
  const double hi = map.max();
  Grid out(map.rows(), map.cols());
  if (hi > lo) {
    auto in = map.values();
    auto ov = out.values();
    for (std::size_t i = 0; i < ov.size(); ++i)
      ov[i] = std::clamp((in[i] - lo) / (hi - lo), 0.0, 1.0);
  }
  return Image(std::move(out));
}

}  // namespace cgei
