#include "cgei/speckle.hpp"

#include <array>
#include <fstream>

#include "binary_io.hpp"

namespace cgei {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
constexpr std::string_view kMagic{"CGEIPAT\0", 8};
constexpr std::uint32_t kVersion = 1;

std::uint64_t splitmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Counter-based draw for pixel `index` of pattern `k`.
std::uint64_t draw(std::uint64_t seed, std::uint64_t k, std::uint64_t index) {
  const std::uint64_t stream = splitmix64(seed + kGamma * (k + 1));
  return splitmix64(stream + kGamma * (index + 1));
}

float sample(Distribution d, std::uint64_t bits) {
  if (d == Distribution::kBernoulli) return static_cast<float>(bits >> 63);
  return static_cast<float>(bits >> 40) * 0x1.0p-24f;
}

int wrap(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

constexpr std::array<Offset, 8> kNeighbours{{
    {-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1},
}};

}  // namespace

std::string to_string(Distribution d) {
  return d == Distribution::kBernoulli ? "bernoulli" : "uniform";
}

Distribution parse_distribution(const std::string& text) {
  if (text == "bernoulli") return Distribution::kBernoulli;
  if (text == "uniform") return Distribution::kUniform;
  throw Error("unknown distribution: " + text);
}

PatternStack::PatternStack(Meta meta, std::vector<float> canvas)
    : PatternStack(meta, std::make_shared<const std::vector<float>>(std::move(canvas))) {}

PatternStack::PatternStack(Meta meta, std::shared_ptr<const std::vector<float>> canvas)
    : meta_(meta), canvas_(std::move(canvas)) {
  if (meta_.rows < 3 || meta_.cols < 3) throw Error("pattern dimensions must be at least 3x3");
  if (meta_.count < 1) throw Error("pattern count must be positive");
  const auto expected = static_cast<std::size_t>(meta_.count) * canvas_rows() * canvas_cols();
  if (canvas_->size() != expected) throw Error("pattern storage does not match dimensions");
  if (has_master() && (std::abs(meta_.offset.dx) > 1 || std::abs(meta_.offset.dy) > 1))
    throw Error("shift leaves the master canvas");
}

std::span<const float> PatternStack::canvas(int k) const {
  const auto stride = static_cast<std::size_t>(canvas_rows()) * canvas_cols();
  return std::span<const float>(*canvas_).subspan(stride * static_cast<std::size_t>(k), stride);
}

double PatternStack::value(int k, int r, int c) const {
  const auto cv = canvas(k);
  if (has_master()) {
    return cv[static_cast<std::size_t>(r + 1 + meta_.offset.dx) * canvas_cols() + c + 1 +
              meta_.offset.dy];
  }
  return cv[static_cast<std::size_t>(wrap(r + meta_.offset.dx, rows())) * cols() +
            wrap(c + meta_.offset.dy, cols())];
}

Grid PatternStack::pattern(int k) const {
  if (k < 0 || k >= count()) throw Error("pattern index out of range");
  Grid g(rows(), cols());
  for (int r = 0; r < rows(); ++r)
    for (int c = 0; c < cols(); ++c) g(r, c) = value(k, r, c);
  return g;
}

Grid PatternStack::master(int k) const {
  if (!has_master()) throw Error("no master canvas");
  const auto cv = canvas(k);
  return Grid(canvas_rows(), canvas_cols(), std::vector<double>(cv.begin(), cv.end()));
}

PatternStack PatternStack::shifted(Offset by) const {
  Meta m = meta_;
  m.offset.dx += by.dx;
  m.offset.dy += by.dy;
  if (!has_master()) {
    m.offset.dx = wrap(m.offset.dx, rows());
    m.offset.dy = wrap(m.offset.dy, cols());
    // keep offsets in the symmetric range so metadata reads naturally
    if (m.offset.dx > rows() / 2) m.offset.dx -= rows();
    if (m.offset.dy > cols() / 2) m.offset.dy -= cols();
  }
  return PatternStack(m, canvas_);
}

bool operator==(const PatternStack& a, const PatternStack& b) {
  if (!(a.meta_ == b.meta_)) return false;
  return a.canvas_ == b.canvas_ || *a.canvas_ == *b.canvas_;
}

PatternStack generate_patterns(int rows, int cols, int count, std::uint64_t seed,
                               Distribution distribution, ShiftMode mode) {
  if (rows < 3 || cols < 3) throw Error("pattern dimensions must be at least 3x3");
  if (count < 1) throw Error("pattern count must be positive");
  PatternStack::Meta meta{rows, cols, count, distribution, seed, mode, {}};
  const int cr = mode == ShiftMode::kMasterCrop ? rows + 2 : rows;
  const int cc = mode == ShiftMode::kMasterCrop ? cols + 2 : cols;
  const auto stride = static_cast<std::size_t>(cr) * cc;
  std::vector<float> canvas(stride * count);
  for (int k = 0; k < count; ++k) {
    float* out = canvas.data() + stride * k;
    for (std::size_t i = 0; i < stride; ++i) out[i] = sample(distribution, draw(seed, k, i));
  }
  return PatternStack(meta, std::move(canvas));
}

PatternStack shifted_group(const PatternStack& stack, Offset offset) {
  if (std::abs(offset.dx) > 1 || std::abs(offset.dy) > 1)
    throw Error("group offset components must be in {-1, 0, 1}");
  return stack.shifted(offset);
}

std::span<const Offset> neighbour_offsets() { return kNeighbours; }

Offset group_shift(int group) {
  if (group < 1 || group > 8) throw Error("speckle group index must be in 1..8");
  const Offset e = kNeighbours[group - 1];
  return {-e.dx, -e.dy};
}

MeasurementMatrix assemble_matrix(const PatternStack& stack) {
  MeasurementMatrix m{stack.rows(), stack.cols(), Matrix(stack.count(), stack.pixels())};
  const bool direct = !stack.has_master() && stack.offset() == Offset{};
  for (int k = 0; k < stack.count(); ++k) {
    if (direct) {
      const auto cv = stack.canvas(k);
      for (int i = 0; i < stack.pixels(); ++i) m.a(k, i) = cv[i];
      continue;
    }
    for (int r = 0; r < stack.rows(); ++r)
      for (int c = 0; c < stack.cols(); ++c) m.a(k, r * stack.cols() + c) = stack.value(k, r, c);
  }
  return m;
}

Grid unflatten(const MeasurementMatrix& matrix, int k) {
  if (k < 0 || k >= matrix.measurements()) throw Error("row index out of range");
  std::vector<double> values(matrix.a.row(k).begin(), matrix.a.row(k).end());
  return Grid(matrix.pattern_rows, matrix.pattern_cols, std::move(values));
}

Vector flatten(const Grid& g) {
  const auto v = g.values();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Grid unflatten(const Vector& x, int rows, int cols) {
  if (x.size() != static_cast<Eigen::Index>(rows) * cols) throw Error("vector length mismatch");
  return Grid(rows, cols, std::vector<double>(x.begin(), x.end()));
}

void write_patterns(std::ostream& out, const PatternStack& stack) {
  using namespace detail;
  const auto& m = stack.meta();
  put_magic(out, kMagic);
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.rows));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.cols));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.count));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.distribution));
  put_le<std::uint64_t>(out, m.seed);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.mode));
  put_i32(out, m.offset.dx);
  put_i32(out, m.offset.dy);
  for (int k = 0; k < stack.count(); ++k) put_f32_block(out, stack.canvas(k));
  if (!out) throw Error("failed to write pattern stack");
}

void write_patterns(const std::filesystem::path& path, const PatternStack& stack) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_patterns(out, stack);
}

PatternStack read_patterns(std::istream& in) {
  using namespace detail;
  expect_magic(in, kMagic, "pattern stack");
  if (get_le<std::uint32_t>(in) != kVersion) throw Error("unsupported pattern stack version");
  PatternStack::Meta m;
  m.rows = static_cast<int>(get_le<std::uint32_t>(in));
  m.cols = static_cast<int>(get_le<std::uint32_t>(in));
  m.count = static_cast<int>(get_le<std::uint32_t>(in));
  const auto dist = get_le<std::uint32_t>(in);
  if (dist > 1) throw Error("unknown distribution tag in pattern stack");
  m.distribution = static_cast<Distribution>(dist);
  m.seed = get_le<std::uint64_t>(in);
  const auto mode = get_le<std::uint32_t>(in);
  if (mode > 1) throw Error("unknown shift mode tag in pattern stack");
  m.mode = static_cast<ShiftMode>(mode);
  m.offset.dx = get_i32(in);
  m.offset.dy = get_i32(in);
  if (m.rows < 3 || m.cols < 3 || m.count < 1) throw Error("invalid pattern stack header");
  const int extra = m.mode == ShiftMode::kMasterCrop ? 2 : 0;
  const auto total = static_cast<std::size_t>(m.count) * (m.rows + extra) * (m.cols + extra);
  std::vector<float> canvas(total);
  get_f32_block(in, canvas);
  return PatternStack(m, std::move(canvas));
}

PatternStack read_patterns(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_patterns(in);
}

}  // namespace cgei
