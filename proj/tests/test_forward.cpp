#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "cgei/forward.hpp"
#include "cgei/metrics.hpp"
#include "support.hpp"

using namespace cgei;
using namespace cgei::testing;

namespace {

PatternStack stack_of(const std::vector<Grid>& patterns) {
  PatternStack::Meta meta;
  meta.rows = patterns.front().rows();
  meta.cols = patterns.front().cols();
  meta.count = static_cast<int>(patterns.size());
  std::vector<float> canvas;
  for (const auto& p : patterns)
    for (double v : p.values()) canvas.push_back(static_cast<float>(v));
  return PatternStack(meta, std::move(canvas));
}

std::vector<BucketVector> acquire_groups(const PatternStack& s, const Grid& t) {
  std::vector<BucketVector> raw;
  for (int l = 1; l <= 8; ++l) raw.push_back(acquire(shifted_group(s, group_shift(l)), t));
  return raw;
}

}  // namespace

TEST(Bucket, AllOnesPatternSumsObject) {
  const Grid t = Grid::from_rows({{0.1, 0.2}, {0.3, 0.4}});
  EXPECT_NEAR(bucket(Grid(2, 2, 1.0), t), 1.0, 1e-15);
}

TEST(Bucket, DeltaPatternSifts) {
  const Grid t = Grid::from_rows({{0.1, 0.2}, {0.3, 0.4}});
  Grid delta(2, 2);
  delta(1, 0) = 1.0;
  EXPECT_EQ(bucket(delta, t), 0.3);
}

TEST(Bucket, MatchesMultiplyAccumulateOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const Grid s = random_grid(rng, 4, 4), t = random_grid(rng, 4, 4);
    ASSERT_NEAR(bucket(s, t), oracle_bucket(s, t), 1e-12);
  }
}

TEST(Bucket, ShapeMismatchFails) {
  EXPECT_THROW(bucket(Grid(3, 3), Grid(3, 4)), Error);
}

TEST(Acquire, SingletonReducesToBucket) {
  std::mt19937_64 rng(2);
  const Image t = random_image(rng, 5, 5);
  const PatternStack s = generate_patterns(5, 5, 1, 3, Distribution::kUniform);
  const BucketVector y = acquire(s, t);
  ASSERT_EQ(y.size(), 1u);
  EXPECT_EQ(y[0], bucket(s.pattern(0), t));
  EXPECT_EQ(y.tag(), ChannelTag::raw({0, 0}));
}

TEST(Acquire, AllOnesStackGivesObjectSum) {
  const Image t = Image(Grid::from_rows({{0.1, 0.5, 0.2}, {0.0, 1.0, 0.3}, {0.4, 0.4, 0.4}}));
  const PatternStack s = stack_of({Grid(3, 3, 1.0), Grid(3, 3, 1.0), Grid(3, 3, 1.0)});
  const BucketVector y = acquire(s, t);
  for (double v : y.values()) EXPECT_NEAR(v, t.sum(), 1e-15);
}

TEST(Acquire, TagCarriesStackOffset) {
  const PatternStack s = generate_patterns(4, 4, 2, 1);
  EXPECT_EQ(acquire(shifted_group(s, {-1, 1}), Image(4, 4, 0.5)).tag(),
            ChannelTag::raw({-1, 1}));
}

TEST(Acquire, IsLinearInObject) {
  std::mt19937_64 rng(4);
  const PatternStack s = generate_patterns(6, 6, 20, 5, Distribution::kUniform);
  for (int trial = 0; trial < 20; ++trial) {
    const Grid t1 = random_grid(rng, 6, 6), t2 = random_grid(rng, 6, 6);
    const double alpha = 0.3, beta = 0.6;
    Grid mix(6, 6);
    for (std::size_t i = 0; i < mix.size(); ++i)
      mix.values()[i] = alpha * t1.values()[i] + beta * t2.values()[i];
    const BucketVector y1 = acquire(s, t1), y2 = acquire(s, t2), ym = acquire(s, mix);
    for (std::size_t k = 0; k < ym.size(); ++k)
      ASSERT_NEAR(ym[k], alpha * y1[k] + beta * y2[k], 1e-12);
  }
}

TEST(Acquire, NoisyEqualsNoiselessPlusNoise) {
  std::mt19937_64 rng(5);
  const Image t = random_image(rng, 8, 8);
  const PatternStack s = generate_patterns(8, 8, 50, 6);
  const BucketVector noisy = acquire(s, t, NoiseSpec{20.0, 99});
  EXPECT_EQ(noisy, add_awgn(acquire(s, t), 20.0, 99));
  EXPECT_EQ(noisy.noise(), (NoiseRecord{20.0, 99}));
  EXPECT_EQ(acquire(s, t, NoiseSpec{std::nullopt, 99}), acquire(s, t));
}

TEST(CombineSobel, ConstantObjectGivesZero) {
  const PatternStack s = generate_patterns(8, 8, 30, 7);
  const SobelBuckets d = combine_sobel(acquire_groups(s, Image(8, 8, 0.6)));
  for (double v : d.horizontal.values()) EXPECT_EQ(v, 0.0);
  for (double v : d.vertical.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(d.horizontal.tag(), ChannelTag::diff_h());
  EXPECT_EQ(d.vertical.tag(), ChannelTag::diff_v());
}

TEST(CombineSobel, IdentityAgainstConvolutionOracle) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Image t = random_image(rng, 16, 16);
    const PatternStack s = generate_patterns(16, 16, 10, 1000 + trial);
    const SobelBuckets d = combine_sobel(acquire_groups(s, t));
    const Grid h = oracle_sobel_h(t), v = oracle_sobel_v(t);
    for (int k = 0; k < s.count(); ++k) {
      const Grid p = s.pattern(k);
      ASSERT_NEAR(d.horizontal[k], oracle_bucket(p, h), 1e-10);
      ASSERT_NEAR(d.vertical[k], oracle_bucket(p, v), 1e-10);
    }
  }
}

TEST(CombineSobel, DeltaPatternReadsChannelAtPoint) {
  std::mt19937_64 rng(9);
  const Image t = random_image(rng, 7, 6);
  const Grid h = oracle_sobel_h(t), v = oracle_sobel_v(t);
  for (int x = 0; x < 7; ++x)
    for (int y = 0; y < 6; ++y) {
      Grid delta(7, 6);
      delta(x, y) = 1.0;
      const SobelBuckets d = combine_sobel(acquire_groups(stack_of({delta}), t));
      ASSERT_NEAR(d.horizontal[0], h(x, y), 1e-12);
      ASSERT_NEAR(d.vertical[0], v(x, y), 1e-12);
    }
}

TEST(CombineSobel, IgnoresOrderAndUnshiftedGroup) {
  std::mt19937_64 rng(10);
  const Image t = random_image(rng, 6, 6);
  const PatternStack s = generate_patterns(6, 6, 8, 3);
  std::vector<BucketVector> raw = acquire_groups(s, t);
  const SobelBuckets ref = combine_sobel(raw);
  std::reverse(raw.begin(), raw.end());
  raw.push_back(acquire(s, t));
  const SobelBuckets d = combine_sobel(raw);
  EXPECT_EQ(d.horizontal, ref.horizontal);
  EXPECT_EQ(d.vertical, ref.vertical);
}

TEST(CombineSobel, RejectsMissingOrMismatchedGroups) {
  const Image t(6, 6, 0.5);
  const PatternStack s = generate_patterns(6, 6, 8, 3);
  std::vector<BucketVector> raw = acquire_groups(s, t);
  raw.pop_back();
  EXPECT_THROW(combine_sobel(raw), Error);
  raw.push_back(acquire(shifted_group(generate_patterns(6, 6, 7, 3), group_shift(8)), t));
  EXPECT_THROW(combine_sobel(raw), Error);
}

TEST(CombineGradient, MatchesShiftDualityOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const Image t = random_image(rng, 8, 8);
    const PatternStack s = generate_patterns(8, 8, 12, 50 + trial, Distribution::kUniform);
    for (int phi : {0, 45, 90, 135}) {
      const BucketVector g = combine_gradient(
          acquire(s, t), acquire(shifted_group(s, gradient_group_shift(phi)), t), phi);
      EXPECT_EQ(g.tag(), ChannelTag::diff_phi(phi));
      const Offset d = gradient_offset(phi);
      const Grid oracle = oracle_difference(t, d.dx, d.dy);
      for (int k = 0; k < s.count(); ++k)
        ASSERT_NEAR(g[k], oracle_bucket(s.pattern(k), oracle), 1e-10);
    }
  }
}

TEST(CombineGradient, ConstantObjectGivesZero) {
  const PatternStack s = generate_patterns(6, 6, 10, 2);
  const Image t(6, 6, 0.25);
  const BucketVector g =
      combine_gradient(acquire(s, t), acquire(shifted_group(s, gradient_group_shift(45)), t), 45);
  for (double v : g.values()) EXPECT_EQ(v, 0.0);
}

TEST(CombineGradient, DiagonalStepGivesNonzeroReadings) {
  Grid g(8, 8);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) g(r, c) = r + c >= 8 ? 1.0 : 0.0;
  const Image t(g);
  const PatternStack s = generate_patterns(8, 8, 20, 4);
  const BucketVector d =
      combine_gradient(acquire(s, t), acquire(shifted_group(s, gradient_group_shift(45)), t), 45);
  int nonzero = 0;
  for (double v : d.values()) nonzero += v != 0.0;
  EXPECT_GT(nonzero, 0);
}

TEST(CombineGradient, RejectsWrongGroups) {
  const PatternStack s = generate_patterns(6, 6, 4, 2);
  const Image t(6, 6, 0.5);
  const BucketVector raw0 = acquire(s, t);
  EXPECT_THROW(combine_gradient(raw0, acquire(shifted_group(s, {1, 1}), t), 45), Error);
  EXPECT_THROW(combine_gradient(raw0, acquire(generate_patterns(6, 6, 3, 2), t), 45), Error);
}

TEST(Awgn, NoisePowerMatchesTarget) {
  const int m = 100000;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(10.0, 20.0);
  std::vector<double> values(m);
  for (double& v : values) v = u(rng);
  const BucketVector clean(ChannelTag::raw({0, 0}), values);
  for (double snr : {30.0, 10.0, 0.0}) {
    const BucketVector noisy = add_awgn(clean, snr, 7);
    double ps = 0.0, pn = 0.0;
    for (int k = 0; k < m; ++k) {
      ps += values[k] * values[k];
      pn += (noisy[k] - values[k]) * (noisy[k] - values[k]);
    }
    const double target = ps / m * std::pow(10.0, -snr / 10.0);
    EXPECT_NEAR(pn / m, target, 0.02 * target) << snr;
  }
}

TEST(Awgn, DeterministicPerSeed) {
  const BucketVector v(ChannelTag::raw({0, 0}), {1.0, 2.0, 3.0, 4.0});
  EXPECT_EQ(add_awgn(v, 10.0, 5), add_awgn(v, 10.0, 5));
  EXPECT_NE(add_awgn(v, 10.0, 5), add_awgn(v, 10.0, 6));
}

TEST(Awgn, GroupSeedsAreDistinctPerOffset) {
  for (std::uint64_t base : {0ull, 1ull, 1000ull}) {
    std::set<std::uint64_t> seeds;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy) seeds.insert(group_noise_seed(base, {dx, dy}));
    EXPECT_EQ(seeds.size(), 9u);
    EXPECT_EQ(group_noise_seed(base, {1, -1}), group_noise_seed(base, {1, -1}));
  }
}

TEST(Awgn, ZeroSignalFails) {
  const BucketVector v(ChannelTag::raw({0, 0}), {0.0, 0.0, 0.0});
  try {
    (void)add_awgn(v, 10.0, 1);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "undefined SNR_BD for zero signal");
  }
  EXPECT_THROW(add_awgn(BucketVector(ChannelTag::raw({0, 0}), {1.0}),
                        std::numeric_limits<double>::infinity(), 1),
               Error);
}

TEST(MeasurementCounts, ReadingsPerPattern) {
  EXPECT_EQ(compression_ratio(6554, 128, 128, kSobelReadingsPerPattern).detector_readings(),
            52432);
  EXPECT_EQ(compression_ratio(6554, 128, 128, kGradientReadingsPerPattern).detector_readings(),
            13108);
}

TEST(BucketFile, BinaryRoundTrip) {
  const BucketVector v(ChannelTag::diff_phi(135), {1.5, -2.25, 1e-300, 3.0},
                       NoiseRecord{12.5, 77});
  std::stringstream buf;
  write_buckets(buf, v);
  EXPECT_EQ(read_buckets(buf), v);

  const BucketVector raw(ChannelTag::raw({-1, 1}), {0.0, 1.0});
  std::stringstream buf2;
  write_buckets(buf2, raw);
  EXPECT_EQ(read_buckets(buf2), raw);

  std::stringstream junk("garbage");
  EXPECT_THROW(read_buckets(junk), Error);
}

TEST(BucketFile, CsvWithSidecar) {
  const auto dir = std::filesystem::temp_directory_path() / "cgei_bucket_csv";
  std::filesystem::create_directories(dir);
  const BucketVector v(ChannelTag::diff_h(), {0.5, -1.0});
  write_buckets_csv(dir / "h.csv", v);
  std::ifstream csv(dir / "h.csv");
  std::stringstream content;
  content << csv.rdbuf();
  EXPECT_EQ(content.str(), "index,value\n0,0.5\n1,-1\n");
  std::ifstream meta(dir / "h.csv.meta");
  std::stringstream side;
  side << meta.rdbuf();
  EXPECT_NE(side.str().find("channel=diff_h"), std::string::npos);
  EXPECT_NE(side.str().find("snr_bd_db=inf"), std::string::npos);
  std::filesystem::remove_all(dir);
}
