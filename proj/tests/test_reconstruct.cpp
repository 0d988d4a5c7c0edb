#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cgei/forward.hpp"
#include "cgei/metrics.hpp"
#include "cgei/phantom.hpp"
#include "cgei/reconstruct.hpp"
#include "support.hpp"

using namespace cgei;
using namespace cgei::testing;

namespace {

ChannelSet sobel_channels(const PatternStack& s, const Grid& t) {
  std::vector<BucketVector> raw;
  for (int l = 1; l <= 8; ++l) raw.push_back(acquire(shifted_group(s, group_shift(l)), t));
  SobelBuckets d = combine_sobel(raw);
  return ChannelSet(std::move(d.horizontal), std::move(d.vertical));
}

BucketVector gradient_channel(const PatternStack& s, const Grid& t, int phi) {
  return combine_gradient(acquire(s, t), acquire(shifted_group(s, gradient_group_shift(phi)), t),
                          phi);
}

// Fidelity-dominated settings for full-sampling recovery.
SolverOptions full_sampling_options() {
  SolverOptions o;
  o.mu = 1048576.0;
  o.outer_tol = 1e-7;
  o.inner_tol = 1e-7;
  o.max_outer = 600;
  o.max_inner = 500;
  return o;
}

}  // namespace

TEST(Correlate, ConstantBucketsGiveZeroMap) {
  const PatternStack s = generate_patterns(6, 6, 40, 1);
  const BucketVector y(ChannelTag::raw({0, 0}), std::vector<double>(40, 3.25));
  const SignedMap g = correlate(s, y);
  for (double v : g.values()) EXPECT_EQ(v, 0.0);
}

TEST(Correlate, SingleFrameGivesZeroMap) {
  const PatternStack s = generate_patterns(5, 5, 1, 2);
  const BucketVector y(ChannelTag::raw({0, 0}), {7.0});
  const SignedMap g = correlate(s, y);
  for (double v : g.values()) EXPECT_EQ(v, 0.0);
}

TEST(Correlate, MatchesCovarianceDefinition) {
  std::mt19937_64 rng(3);
  const PatternStack s = generate_patterns(4, 5, 30, 4, Distribution::kUniform);
  const BucketVector y = acquire(s, random_image(rng, 4, 5));
  const SignedMap g = correlate(s, y);
  const double m = 30.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 5; ++c) {
      double sy = 0.0, ss = 0.0, yy = 0.0;
      for (int k = 0; k < 30; ++k) {
        sy += s.value(k, r, c) * y[k];
        ss += s.value(k, r, c);
        yy += y[k];
      }
      ASSERT_NEAR(g(r, c), sy / m - (ss / m) * (yy / m), 1e-10);
    }
}

TEST(Correlate, RejectsMismatchedLengths) {
  const PatternStack s = generate_patterns(5, 5, 3, 2);
  EXPECT_THROW(correlate(s, BucketVector(ChannelTag::raw({0, 0}), {1.0, 2.0})), Error);
  EXPECT_THROW(correlate(s, BucketVector(ChannelTag::raw({0, 0}), {})), Error);
}

TEST(Correlate, ConvergesToBinaryObject) {
  std::mt19937_64 rng(5);
  const Image t = random_binary_image(rng, 8, 8);
  const PatternStack s = generate_patterns(8, 8, 50 * 64, 6);
  EXPECT_GT(normalized_cross_correlation(correlate(s, acquire(s, t)), t), 0.9);
}

TEST(Correlate, ShiftEquivariantUnderPeriodicWrap) {
  std::mt19937_64 rng(6);
  const PatternStack s = generate_patterns(6, 7, 25, 7, Distribution::kUniform);
  const BucketVector y = acquire(s, random_image(rng, 6, 7));
  const SignedMap base = correlate(s, y);
  for (Offset o : neighbour_offsets())
    EXPECT_EQ(correlate(shifted_group(s, o), y), shift(base, o.dx, o.dy, ShiftMode::kPeriodic));
}

TEST(Correlate, ScalesWithBuckets) {
  std::mt19937_64 rng(7);
  const Image t = random_binary_image(rng, 8, 8);
  const PatternStack s = generate_patterns(8, 8, 200, 8);
  const ChannelSet set(gradient_channel(s, t, 45));
  const BucketVector& y = set.channels()[0];
  std::vector<double> scaled(y.values().begin(), y.values().end());
  for (double& v : scaled) v *= 2.5;
  const BucketVector ys(y.tag(), scaled);
  const SignedMap a = correlate(s, y), b = correlate(s, ys);
  for (std::size_t i = 0; i < a.size(); ++i)
    ASSERT_NEAR(b.values()[i], 2.5 * a.values()[i], 1e-12 * (1.0 + std::abs(a.values()[i])));
  const EdgeMap ea = edge_by_correlation(set, s).edge;
  const EdgeMap eb = edge_by_correlation(ChannelSet(ys), s).edge;
  const auto argmax = [](const Grid& g) {
    return std::max_element(g.values().begin(), g.values().end()) - g.values().begin();
  };
  EXPECT_EQ(argmax(ea), argmax(eb));
}

TEST(EdgeByCorrelation, ConstantObjectGivesZeroEdges) {
  const PatternStack s = generate_patterns(8, 8, 100, 9);
  const ReconstructionResult r = edge_by_correlation(sobel_channels(s, Image(8, 8, 0.4)), s);
  EXPECT_EQ(r.method, Method::kSsgi);
  EXPECT_LT(r.edge.max(), 1e-10);
}

TEST(EdgeByCorrelation, RectangleAtHighSampling) {
  const Image t = rectangle_phantom(32, 32, 8, 10, 21, 24);
  const PatternStack s = generate_patterns(32, 32, 20 * 1024, 10);
  const ReconstructionResult r = edge_by_correlation(sobel_channels(s, t), s);
  EXPECT_EQ(r.channels.size(), 2u);
  EXPECT_GT(normalized_cross_correlation(r.edge, sobel_reference(t).magnitude), 0.8);
}

TEST(EdgeByCorrelation, ZeroDegreeGradientLocalizesStep) {
  // Rows 3..7 are bright; the zero-degree difference runs along the row index.
  Grid g(12, 12);
  for (int r = 3; r <= 7; ++r)
    for (int c = 0; c < 12; ++c) g(r, c) = 1.0;
  const Image t(g);
  const PatternStack s = generate_patterns(12, 12, 4000, 11);
  const ReconstructionResult r = edge_by_correlation(ChannelSet(gradient_channel(s, t, 0)), s);
  EXPECT_EQ(r.method, Method::kGgi);
  const Grid truth = magnitude(gradient_reference(t, 0));
  double weakest_step = 1e300, strongest_flat = 0.0;
  for (int row = 0; row < 12; ++row)
    for (int c = 0; c < 12; ++c) {
      if (truth(row, c) > 0) weakest_step = std::min(weakest_step, r.edge(row, c));
      else strongest_flat = std::max(strongest_flat, r.edge(row, c));
    }
  EXPECT_GT(weakest_step, strongest_flat);
}

TEST(ChannelSetType, ValidatesTags) {
  const BucketVector h(ChannelTag::diff_h(), {1.0, 2.0});
  const BucketVector v(ChannelTag::diff_v(), {1.0, 2.0});
  EXPECT_NO_THROW(ChannelSet(h, v));
  EXPECT_THROW(ChannelSet(h, h), Error);
  EXPECT_THROW(ChannelSet{h}, Error);
  EXPECT_THROW(ChannelSet(h, BucketVector(ChannelTag::diff_v(), {1.0})), Error);
  EXPECT_NO_THROW(ChannelSet(BucketVector(ChannelTag::diff_phi(45), {1.0})));
}

TEST(Fusion, InvariantToChannelSignAndBoundedBelow) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Grid h = random_grid(rng, 6, 6, -1, 1), v = random_grid(rng, 6, 6, -1, 1);
    Grid nh = h;
    for (double& x : nh.values()) x = -x;
    const EdgeMap e = magnitude(h, v);
    EXPECT_EQ(magnitude(nh, v), e);
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double floor =
          std::max(std::abs(h.values()[i]), std::abs(v.values()[i])) / std::sqrt(2.0);
      ASSERT_GE(e.values()[i], floor);
    }
  }
}

TEST(EdgeByCs, ZeroChannelsGiveZeroEdges) {
  const PatternStack s = generate_patterns(10, 10, 40, 13);
  const ChannelSet set(BucketVector(ChannelTag::diff_h(), std::vector<double>(40, 0.0)),
                       BucketVector(ChannelTag::diff_v(), std::vector<double>(40, 0.0)));
  const ReconstructionResult r = edge_by_cs(assemble_matrix(s), set);
  EXPECT_EQ(r.method, Method::kCgei);
  EXPECT_EQ(r.edge.max(), 0.0);
  EXPECT_EQ(r.diagnostics.size(), 2u);
  EXPECT_FALSE(r.flagged);
}

TEST(EdgeByCs, FullSamplingRecoversSobelMagnitude) {
  const Image t = nested_rectangles_phantom(32, 32);
  const PatternStack s = generate_patterns(32, 32, 1024, 14);
  const ReconstructionResult r =
      edge_by_cs(assemble_matrix(s), sobel_channels(s, t), full_sampling_options());
  EXPECT_LT(relative_l2(r.edge.values(), sobel_reference(t).magnitude.values()), 0.02);
}

TEST(EdgeByCs, FlagsNonConvergence) {
  std::mt19937_64 rng(15);
  const Image t = random_image(rng, 10, 10);
  const PatternStack s = generate_patterns(10, 10, 40, 15);
  SolverOptions o;
  o.max_outer = 1;
  const ReconstructionResult r =
      edge_by_cs(assemble_matrix(s), ChannelSet(gradient_channel(s, t, 45)), o);
  EXPECT_TRUE(r.flagged);
}

TEST(EdgeByCs, RejectsMismatchedLengths) {
  const PatternStack s = generate_patterns(6, 6, 10, 1);
  const ChannelSet set(BucketVector(ChannelTag::diff_phi(0), std::vector<double>(9, 1.0)));
  EXPECT_THROW(edge_by_cs(assemble_matrix(s), set), Error);
}

TEST(Csgi, ZeroReadingsGiveZeroEdges) {
  const PatternStack s = generate_patterns(8, 8, 30, 16);
  const BucketVector raw(ChannelTag::raw({0, 0}), std::vector<double>(30, 0.0));
  const ReconstructionResult r = csgi_edge(assemble_matrix(s), raw, EdgeOperator::sobel());
  EXPECT_EQ(r.method, Method::kCsgi);
  EXPECT_EQ(r.edge.max(), 0.0);
}

TEST(Csgi, FullSamplingRecoversImageAndEdges) {
  const Image t = nested_rectangles_phantom(32, 32);
  const PatternStack s = generate_patterns(32, 32, 1024, 17);
  const MeasurementMatrix a = assemble_matrix(s);
  const BucketVector raw = acquire(s, t);
  const ReconstructionResult r = csgi_edge(a, raw, EdgeOperator::sobel(), full_sampling_options());
  ASSERT_EQ(r.channels.size(), 1u);
  EXPECT_LT(relative_l2(r.channels[0].values(), t.values()), 0.02);
  EXPECT_LT(relative_l2(r.edge.values(), sobel_reference(t).magnitude.values()), 0.02);

  const ReconstructionResult g = csgi_edge(a, raw, EdgeOperator::gradient(45),
                                           full_sampling_options());
  EXPECT_LT(relative_l2(g.edge.values(), magnitude(gradient_reference(t, 45)).values()), 0.02);
}

TEST(Csgi, NeedsUnshiftedReadings) {
  const PatternStack s = generate_patterns(6, 6, 10, 1);
  const BucketVector shifted = acquire(shifted_group(s, {1, 0}), Image(6, 6, 0.5));
  EXPECT_THROW(csgi_edge(assemble_matrix(s), shifted, EdgeOperator::sobel()), Error);
}

TEST(Reconstruct, BitReproducible) {
  std::mt19937_64 rng(18);
  const Image t = random_binary_image(rng, 12, 12);
  const PatternStack s = generate_patterns(12, 12, 70, 19);
  const MeasurementMatrix a = assemble_matrix(s);
  const ChannelSet set = sobel_channels(s, t);
  EXPECT_EQ(edge_by_cs(a, set).edge, edge_by_cs(a, set).edge);
  EXPECT_EQ(edge_by_correlation(set, s).edge, edge_by_correlation(set, s).edge);
  const BucketVector raw = acquire(s, t);
  EXPECT_EQ(csgi_edge(a, raw, EdgeOperator::gradient(45)).edge,
            csgi_edge(a, raw, EdgeOperator::gradient(45)).edge);
}
