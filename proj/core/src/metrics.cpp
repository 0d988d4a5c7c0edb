#include "cgei/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace cgei {

std::size_t RegionMasks::edge_count() const {
  return static_cast<std::size_t>(std::count(edge.begin(), edge.end(), true));
}

std::size_t RegionMasks::background_count() const {
  return static_cast<std::size_t>(std::count(background.begin(), background.end(), true));
}

void RegionMasks::validate() const {
  const auto n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  if (rows <= 0 || cols <= 0 || edge.size() != n || background.size() != n)
    throw Error("mask dimensions are inconsistent");
  for (std::size_t i = 0; i < n; ++i)
    if (edge[i] && background[i]) throw Error("edge and background masks overlap");
  if (edge_count() == 0) throw Error("edge mask is empty");
  if (background_count() < 2) throw Error("background mask needs at least two pixels");
}

double edge_snr(const Grid& map, const RegionMasks& masks) {
  masks.validate();
  if (map.rows() != masks.rows || map.cols() != masks.cols)
    throw Error("mask dimensions do not match the map");
  const auto v = map.values();
  double edge_sum = 0.0;
  double back_sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (masks.edge[i]) edge_sum += v[i];
    if (masks.background[i]) back_sum += v[i];
  }
  const double edge_mean = edge_sum / static_cast<double>(masks.edge_count());
  const auto nb = static_cast<double>(masks.background_count());
  const double back_mean = back_sum / nb;
  double var = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!masks.background[i]) continue;
    const double d = v[i] - back_mean;
    var += d * d;
  }
  var /= nb;
  if (!(var > 0.0)) throw Error("degenerate background");
  return (edge_mean - back_mean) / std::sqrt(var);
}

CompressionRatio compression_ratio(std::int64_t patterns, int rows, int cols,
                                   int readings_per_pattern) {
  if (patterns <= 0 || rows <= 0 || cols <= 0 || readings_per_pattern <= 0)
    throw Error("compression ratio arguments must be positive");
  return {patterns, static_cast<std::int64_t>(rows) * cols, readings_per_pattern};
}

int patterns_for_ratio(double ratio, int rows, int cols) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) throw Error("compression ratio must be positive");
  const auto m = std::llround(ratio * rows * cols);
  return static_cast<int>(std::max<long long>(1, m));
}

RegionMasks make_masks(const Grid& ground_truth, const MaskOptions& opts) {
  if (!(opts.threshold_fraction > 0.0 && opts.threshold_fraction < 1.0))
    throw Error("mask threshold fraction must lie in (0, 1)");
  if (opts.dilation < 0) throw Error("mask dilation must be nonnegative");

  const EdgeMap mag = sobel_reference(ground_truth, ShiftMode::kPeriodic).magnitude;
  const int rows = mag.rows();
  const int cols = mag.cols();
  const double cut = opts.threshold_fraction * mag.max();

  RegionMasks masks{rows, cols, std::vector<bool>(mag.size(), false),
                    std::vector<bool>(mag.size(), true)};
  if (mag.max() > 0.0) {
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        if (mag(r, c) >= cut) masks.edge[static_cast<std::size_t>(r) * cols + c] = true;
  }
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!masks.edge[static_cast<std::size_t>(r) * cols + c]) continue;
      for (int dr = -opts.dilation; dr <= opts.dilation; ++dr) {
        for (int dc = -opts.dilation; dc <= opts.dilation; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr < 0 || cc < 0 || rr >= rows || cc >= cols) continue;
          masks.background[static_cast<std::size_t>(rr) * cols + cc] = false;
        }
      }
    }
  }
  masks.validate();
  return masks;
}

Image mask_image(const RegionMasks& masks) {
  Grid g(masks.rows, masks.cols);
  auto v = g.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (masks.edge[i]) v[i] = 1.0;
    else if (masks.background[i]) v[i] = 0.5;
  }
  return Image(std::move(g));
}

double normalized_cross_correlation(const Grid& a, const Grid& b) {
  if (!a.same_shape(b)) throw Error("grids differ in shape");
  const auto av = a.values();
  const auto bv = b.values();
  const double n = static_cast<double>(av.size());
  const double ma = a.sum() / n;
  const double mb = b.sum() / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double da = av[i] - ma;
    const double db = bv[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace cgei
