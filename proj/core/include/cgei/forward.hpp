#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cgei/image.hpp"
#include "cgei/speckle.hpp"

namespace cgei {

enum class ChannelKind {
  kRaw,      ///< plain bucket readings of one shifted group
  kDiffH,    ///< horizontal Sobel combination
  kDiffV,    ///< vertical Sobel combination
  kDiffPhi,  ///< directional one-pixel difference
};

struct ChannelTag {
  ChannelKind kind = ChannelKind::kRaw;
  Offset offset;  ///< group shift, kRaw only
  int phi = 0;    ///< degrees, kDiffPhi only

  static ChannelTag raw(Offset o) { return {ChannelKind::kRaw, o, 0}; }
  static ChannelTag diff_h() { return {ChannelKind::kDiffH, {}, 0}; }
  static ChannelTag diff_v() { return {ChannelKind::kDiffV, {}, 0}; }
  static ChannelTag diff_phi(int phi) { return {ChannelKind::kDiffPhi, {}, phi}; }

  friend bool operator==(const ChannelTag&, const ChannelTag&) = default;
};

std::string to_string(const ChannelTag& tag);

struct NoiseRecord {
  std::optional<double> snr_bd_db;
  std::uint64_t noise_seed = 0;
  friend bool operator==(const NoiseRecord&, const NoiseRecord&) = default;
};

/// AWGN request. An absent SNR means a noiseless detector.
struct NoiseSpec {
  std::optional<double> snr_bd_db;
  std::uint64_t seed = 0;
};

/// Detector readings for one channel. The tag is fixed at construction.
class BucketVector {
 public:
  BucketVector(ChannelTag tag, std::vector<double> values, NoiseRecord noise = {});

  const ChannelTag& tag() const { return tag_; }
  const NoiseRecord& noise() const { return noise_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }

  friend bool operator==(const BucketVector&, const BucketVector&) = default;

 private:
  ChannelTag tag_;
  std::vector<double> values_;
  NoiseRecord noise_;
};

/// y = sum_{x,y} S(x,y) T(x,y), summed row-major.
double bucket(const Grid& pattern, const Grid& object);

/// One reading per pattern of `stack` (shift offset applied), plus AWGN when
/// `noise` carries an SNR. Tagged RAW(stack offset).
BucketVector acquire(const PatternStack& stack, const Grid& object, const NoiseSpec& noise = {});

/// Noise seed for the readings of the group at shift offset `o`; distinct for
/// each of the nine offsets.
std::uint64_t group_noise_seed(std::uint64_t noise_seed, Offset o);

/// Adds zero-mean Gaussian noise with power mean(v^2) * 10^(-snr/10).
BucketVector add_awgn(const BucketVector& v, double snr_bd_db, std::uint64_t noise_seed);

/// Signal power of a reading vector: mean of squares.
double signal_power(std::span<const double> values);

struct SobelBuckets {
  BucketVector horizontal;
  BucketVector vertical;
};

/// Weighted Sobel combination of the eight shifted-group readings:
///   h_k = y1 + 2 y2 + y3 - y6 - 2 y7 - y8
///   v_k = y1 + 2 y4 + y6 - y3 - 2 y5 - y8
/// Groups are located by their RAW offset tag; the unshifted group, if
/// present, is ignored.
SobelBuckets combine_sobel(std::span<const BucketVector> raw);

/// Shift offset of the group whose readings pair with the unshifted group
/// for a phi-gradient: the group seeing neighbour T(p + d).
Offset gradient_group_shift(int phi_degrees);

/// raw_shifted - raw0, equal to bucket(S, D_phi T) under PERIODIC.
BucketVector combine_gradient(const BucketVector& raw0, const BucketVector& raw_shifted,
                              int phi_degrees);

/// Raw detector readings consumed per pattern.
constexpr int kSobelReadingsPerPattern = 8;
constexpr int kGradientReadingsPerPattern = 2;

// Binary container: "CGEIBKT\0", u32 version, u32 length, u32 kind, i32 dx,
// dy, phi, u32 has_noise, f64 snr_bd_db, u64 noise_seed, then f64 readings.
void write_buckets(std::ostream& out, const BucketVector& v);
void write_buckets(const std::filesystem::path& path, const BucketVector& v);
BucketVector read_buckets(std::istream& in);
BucketVector read_buckets(const std::filesystem::path& path);

/// CSV rows "index,value" plus a key=value sidecar at `<path>.meta` holding
/// the channel tag and noise record.
void write_buckets_csv(const std::filesystem::path& path, const BucketVector& v);

}  // namespace cgei
