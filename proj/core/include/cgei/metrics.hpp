#pragma once

#include <cstdint>
#include <vector>

#include "cgei/image.hpp"

namespace cgei {

/// Edge and background regions used to score an edge map.
struct RegionMasks {
  int rows = 0;
  int cols = 0;
  std::vector<bool> edge;
  std::vector<bool> background;

  std::size_t edge_count() const;
  std::size_t background_count() const;
  /// Disjoint, sized rows*cols, edge nonempty, at least two background pixels.
  void validate() const;
};

/// (mean(edge) - mean(back)) / sqrt(var(back)), population variance.
/// Throws "degenerate background" when the background variance is zero.
double edge_snr(const Grid& map, const RegionMasks& masks);

/// Compression ratio M / (m n), with M' = M l raw detector readings.
struct CompressionRatio {
  std::int64_t patterns = 0;
  std::int64_t pixels = 0;
  int readings_per_pattern = 1;

  double value() const { return static_cast<double>(patterns) / static_cast<double>(pixels); }
  std::int64_t detector_readings() const { return patterns * readings_per_pattern; }
};

CompressionRatio compression_ratio(std::int64_t patterns, int rows, int cols,
                                   int readings_per_pattern = 1);

/// Pattern count for a target ratio, rounded to nearest (at least 1).
int patterns_for_ratio(double ratio, int rows, int cols);

struct MaskOptions {
  double threshold_fraction = 0.5;
  int dilation = 2;
};

/// edge = Sobel magnitude of the ground truth >= threshold * max; background =
/// everything farther than `dilation` pixels (Chebyshev) from an edge pixel.
RegionMasks make_masks(const Grid& ground_truth, const MaskOptions& opts = {});

/// Edge mask as a 0/1 image, background as 0.5, the rest 0, for visual audit.
Image mask_image(const RegionMasks& masks);

/// Pearson correlation of two equally sized grids.
double normalized_cross_correlation(const Grid& a, const Grid& b);

}  // namespace cgei
