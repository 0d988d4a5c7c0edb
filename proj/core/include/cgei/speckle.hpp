#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cgei/image.hpp"

namespace cgei {

enum class Distribution {
  kBernoulli,  ///< {0, 1} with p = 0.5 (binary DMD mirrors)
  kUniform,    ///< U[0, 1), 24-bit resolution
};

std::string to_string(Distribution d);
Distribution parse_distribution(const std::string& text);

/// M illumination patterns of size rows x cols.
///
/// Pattern values live on a per-pattern canvas: the pattern itself under
/// PERIODIC, or an (m+2)x(n+2) master under MASTER_CROP whose center crop is
/// the unshifted pattern. A stack additionally carries the shift offset of
/// its group; shifted groups share the canvas storage of their parent, so all
/// nine groups of one experiment derive from one field.
class PatternStack {
 public:
  struct Meta {
    int rows = 0;
    int cols = 0;
    int count = 0;
    Distribution distribution = Distribution::kBernoulli;
    std::uint64_t seed = 0;
    ShiftMode mode = ShiftMode::kPeriodic;
    Offset offset;
    friend bool operator==(const Meta&, const Meta&) = default;
  };

  PatternStack(Meta meta, std::vector<float> canvas);

  const Meta& meta() const { return meta_; }
  int rows() const { return meta_.rows; }
  int cols() const { return meta_.cols; }
  int count() const { return meta_.count; }
  int pixels() const { return meta_.rows * meta_.cols; }
  ShiftMode mode() const { return meta_.mode; }
  Offset offset() const { return meta_.offset; }
  bool has_master() const { return meta_.mode == ShiftMode::kMasterCrop; }

  int canvas_rows() const { return has_master() ? meta_.rows + 2 : meta_.rows; }
  int canvas_cols() const { return has_master() ? meta_.cols + 2 : meta_.cols; }

  /// Raw canvas of pattern k (pattern or master), row-major.
  std::span<const float> canvas(int k) const;

  /// Pattern k of this group at (r, c), offset applied.
  double value(int k, int r, int c) const;

  /// Pattern k materialized as a grid.
  Grid pattern(int k) const;

  /// Master canvas of pattern k; throws "no master canvas" under PERIODIC.
  Grid master(int k) const;

  /// Same canvas viewed through an additional shift.
  PatternStack shifted(Offset by) const;

  friend bool operator==(const PatternStack& a, const PatternStack& b);

 private:
  PatternStack(Meta meta, std::shared_ptr<const std::vector<float>> canvas);

  Meta meta_;
  std::shared_ptr<const std::vector<float>> canvas_;
};

/// Draws M independent patterns. Pattern k depends only on (seed, k, geometry,
/// distribution), never on generation order.
PatternStack generate_patterns(int rows, int cols, int count, std::uint64_t seed,
                               Distribution distribution = Distribution::kBernoulli,
                               ShiftMode mode = ShiftMode::kPeriodic);

/// Group S^l with S^l(a, b) = S(a + dx, b + dy); components must lie in {-1, 0, 1}.
PatternStack shifted_group(const PatternStack& stack, Offset offset);

/// The eight nonzero offsets: group l (1-based) has
/// T-neighbour e_l enumerated row-major over {-1,0,1}^2 \ {0}, and shift
/// offset -e_l.
std::span<const Offset> neighbour_offsets();
Offset group_shift(int group);

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// M x N sensing matrix; row k is pattern k flattened row-major.
struct MeasurementMatrix {
  int pattern_rows = 0;
  int pattern_cols = 0;
  Matrix a;

  int measurements() const { return static_cast<int>(a.rows()); }
  int unknowns() const { return static_cast<int>(a.cols()); }
};

MeasurementMatrix assemble_matrix(const PatternStack& stack);

/// Row k reshaped back to a pattern.
Grid unflatten(const MeasurementMatrix& matrix, int k);

/// Row-major flattening of a grid into a column vector and back.
Vector flatten(const Grid& g);
Grid unflatten(const Vector& x, int rows, int cols);

// Binary container: "CGEIPAT\0", u32 version, u32 rows, cols, count,
// u32 distribution, u64 seed, u32 mode, i32 dx, dy, then little-endian f32
// canvases pattern by pattern.
void write_patterns(std::ostream& out, const PatternStack& stack);
void write_patterns(const std::filesystem::path& path, const PatternStack& stack);
PatternStack read_patterns(std::istream& in);
PatternStack read_patterns(const std::filesystem::path& path);

}  // namespace cgei
