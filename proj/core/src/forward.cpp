#include "cgei/forward.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "binary_io.hpp"

namespace cgei {

namespace {

constexpr std::string_view kMagic{"CGEIBKT\0", 8};
constexpr std::uint32_t kVersion = 1;

const char* kind_name(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::kRaw: return "raw";
    case ChannelKind::kDiffH: return "diff_h";
    case ChannelKind::kDiffV: return "diff_v";
    case ChannelKind::kDiffPhi: return "diff_phi";
  }
  return "?";
}

int wrap(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

const BucketVector& find_group(std::span<const BucketVector> raw, int group) {
  const Offset want = group_shift(group);
  const BucketVector* found = nullptr;
  for (const auto& v : raw) {
    if (v.tag() == ChannelTag::raw(want)) {
      if (found) throw Error("duplicate readings for speckle group " + std::to_string(group));
      found = &v;
    }
  }
  if (!found) throw Error("missing readings for speckle group " + std::to_string(group));
  return *found;
}

}  // namespace

std::string to_string(const ChannelTag& tag) {
  std::string s = kind_name(tag.kind);
  if (tag.kind == ChannelKind::kRaw)
    s += "(" + std::to_string(tag.offset.dx) + "," + std::to_string(tag.offset.dy) + ")";
  if (tag.kind == ChannelKind::kDiffPhi) s += "(" + std::to_string(tag.phi) + ")";
  return s;
}

BucketVector::BucketVector(ChannelTag tag, std::vector<double> values, NoiseRecord noise)
    : tag_(tag), values_(std::move(values)), noise_(noise) {
  if (noise_.snr_bd_db && !std::isfinite(*noise_.snr_bd_db))
    throw Error("SNR_BD must be finite when present");
}

double bucket(const Grid& pattern, const Grid& object) {
  if (!pattern.same_shape(object)) throw Error("pattern and object dimensions differ");
  const auto s = pattern.values();
  const auto t = object.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) sum += s[i] * t[i];
  return sum;
}

BucketVector acquire(const PatternStack& stack, const Grid& object, const NoiseSpec& noise) {
  if (stack.rows() != object.rows() || stack.cols() != object.cols())
    throw Error("pattern and object dimensions differ");

  // Canvas row/column feeding each pattern pixel of this group.
  const Offset d = stack.offset();
  std::vector<int> src_row(stack.rows());
  std::vector<int> src_col(stack.cols());
  for (int r = 0; r < stack.rows(); ++r)
    src_row[r] = stack.has_master() ? r + 1 + d.dx : wrap(r + d.dx, stack.rows());
  for (int c = 0; c < stack.cols(); ++c)
    src_col[c] = stack.has_master() ? c + 1 + d.dy : wrap(c + d.dy, stack.cols());

  const int stride = stack.canvas_cols();
  std::vector<double> y(stack.count());
  for (int k = 0; k < stack.count(); ++k) {
    const auto cv = stack.canvas(k);
    double sum = 0.0;
    for (int r = 0; r < stack.rows(); ++r) {
      const float* row = cv.data() + static_cast<std::size_t>(src_row[r]) * stride;
      for (int c = 0; c < stack.cols(); ++c) sum += row[src_col[c]] * object(r, c);
    }
    y[k] = sum;
  }

  BucketVector clean(ChannelTag::raw(d), std::move(y));
  if (!noise.snr_bd_db) return clean;
  return add_awgn(clean, *noise.snr_bd_db, noise.seed);
}

double signal_power(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return sum / static_cast<double>(values.size());
}

std::uint64_t group_noise_seed(std::uint64_t noise_seed, Offset o) {
  std::uint64_t z = noise_seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>((o.dx + 1) * 3 + o.dy + 2);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

BucketVector add_awgn(const BucketVector& v, double snr_bd_db, std::uint64_t noise_seed) {
  if (!std::isfinite(snr_bd_db)) throw Error("SNR_BD must be finite");
  const double power_s = signal_power(v.values());
  if (power_s == 0.0) throw Error("undefined SNR_BD for zero signal");
  const double power_n = power_s * std::pow(10.0, -snr_bd_db / 10.0);

  std::mt19937_64 rng(noise_seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(power_n));
  std::vector<double> out(v.values().begin(), v.values().end());
  for (double& x : out) x += gauss(rng);
  return BucketVector(v.tag(), std::move(out), NoiseRecord{snr_bd_db, noise_seed});
}

SobelBuckets combine_sobel(std::span<const BucketVector> raw) {
  std::array<const BucketVector*, 9> g{};
  for (int l = 1; l <= 8; ++l) g[l] = &find_group(raw, l);
  const std::size_t m = g[1]->size();
  for (int l = 2; l <= 8; ++l)
    if (g[l]->size() != m) throw Error("shifted group readings differ in length");

  std::vector<double> h(m);
  std::vector<double> v(m);
  for (std::size_t k = 0; k < m; ++k) {
    auto y = [&](int l) { return (*g[l])[k]; };
    h[k] = (y(1) + 2.0 * y(2) + y(3)) - (y(6) + 2.0 * y(7) + y(8));
    v[k] = (y(1) + 2.0 * y(4) + y(6)) - (y(3) + 2.0 * y(5) + y(8));
  }
  // The combined channel inherits the noise record of its inputs.
  const NoiseRecord noise = g[1]->noise();
  return {BucketVector(ChannelTag::diff_h(), std::move(h), noise),
          BucketVector(ChannelTag::diff_v(), std::move(v), noise)};
}

Offset gradient_group_shift(int phi_degrees) {
  const Offset d = gradient_offset(phi_degrees);
  return {-d.dx, -d.dy};
}

BucketVector combine_gradient(const BucketVector& raw0, const BucketVector& raw_shifted,
                              int phi_degrees) {
  if (raw0.size() != raw_shifted.size()) throw Error("gradient readings differ in length");
  if (raw0.tag() != ChannelTag::raw({0, 0})) throw Error("expected unshifted readings");
  if (raw_shifted.tag() != ChannelTag::raw(gradient_group_shift(phi_degrees)))
    throw Error("shifted readings do not match the gradient angle");
  std::vector<double> out(raw0.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = raw_shifted[k] - raw0[k];
  return BucketVector(ChannelTag::diff_phi(phi_degrees), std::move(out), raw0.noise());
}

void write_buckets(std::ostream& out, const BucketVector& v) {
  using namespace detail;
  put_magic(out, kMagic);
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(v.size()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(v.tag().kind));
  put_i32(out, v.tag().offset.dx);
  put_i32(out, v.tag().offset.dy);
  put_i32(out, v.tag().phi);
  put_le<std::uint32_t>(out, v.noise().snr_bd_db ? 1u : 0u);
  put_f64(out, v.noise().snr_bd_db.value_or(0.0));
  put_le<std::uint64_t>(out, v.noise().noise_seed);
  for (double x : v.values()) put_f64(out, x);
  if (!out) throw Error("failed to write bucket vector");
}

void write_buckets(const std::filesystem::path& path, const BucketVector& v) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_buckets(out, v);
}

BucketVector read_buckets(std::istream& in) {
  using namespace detail;
  expect_magic(in, kMagic, "bucket vector");
  if (get_le<std::uint32_t>(in) != kVersion) throw Error("unsupported bucket vector version");
  const auto length = get_le<std::uint32_t>(in);
  const auto kind = get_le<std::uint32_t>(in);
  if (kind > 3) throw Error("unknown channel kind in bucket vector");
  ChannelTag tag;
  tag.kind = static_cast<ChannelKind>(kind);
  tag.offset.dx = get_i32(in);
  tag.offset.dy = get_i32(in);
  tag.phi = get_i32(in);
  NoiseRecord noise;
  const bool noisy = get_le<std::uint32_t>(in) != 0;
  const double snr = get_f64(in);
  if (noisy) noise.snr_bd_db = snr;
  noise.noise_seed = get_le<std::uint64_t>(in);
  std::vector<double> values(length);
  for (double& x : values) x = get_f64(in);
  return BucketVector(tag, std::move(values), noise);
}

BucketVector read_buckets(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_buckets(in);
}

void write_buckets_csv(const std::filesystem::path& path, const BucketVector& v) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  char buf[64];
  out << "index,value\n";
  for (std::size_t k = 0; k < v.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", v[k]);
    out << k << ',' << buf << '\n';
  }
  std::ofstream meta(path.string() + ".meta");
  if (!meta) throw Error("cannot write bucket sidecar for " + path.string());
  meta << "channel=" << to_string(v.tag()) << '\n';
  meta << "length=" << v.size() << '\n';
  if (v.noise().snr_bd_db) {
    std::snprintf(buf, sizeof buf, "%.17g", *v.noise().snr_bd_db);
    meta << "snr_bd_db=" << buf << '\n';
  } else {
    meta << "snr_bd_db=inf\n";
  }
  meta << "noise_seed=" << v.noise().noise_seed << '\n';
}

}  // namespace cgei
