#include "cgei/reconstruct.hpp"

namespace cgei {

namespace {

void check_lengths(const ChannelSet& set, std::size_t expected) {
  for (const auto& c : set.channels())
    if (c.size() != expected) throw Error("channel length does not match pattern count");
}

EdgeMap fuse(const std::vector<SignedMap>& maps) {
  return maps.size() == 2 ? magnitude(maps[0], maps[1]) : magnitude(maps[0]);
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::kGgi: return "GGI";
    case Method::kSsgi: return "SSGI";
    case Method::kCgei: return "CGEI";
    case Method::kCsgi: return "CSGI";
  }
  return "?";
}

ChannelSet::ChannelSet(BucketVector phi) {
  if (phi.tag().kind != ChannelKind::kDiffPhi) throw Error("single-channel set needs DIFF_PHI");
  channels_.push_back(std::move(phi));
}

ChannelSet::ChannelSet(BucketVector horizontal, BucketVector vertical) {
  if (horizontal.tag().kind != ChannelKind::kDiffH || vertical.tag().kind != ChannelKind::kDiffV)
    throw Error("two-channel set needs DIFF_H and DIFF_V");
  if (horizontal.size() != vertical.size()) throw Error("channel lengths differ");
  channels_.push_back(std::move(horizontal));
  channels_.push_back(std::move(vertical));
}

int ReconstructionResult::solver_iterations() const {
  int total = 0;
  for (const auto& d : diagnostics) total += d.outer_iterations;
  return total;
}

SignedMap correlate(const PatternStack& stack, const BucketVector& v) {
  if (v.size() == 0) throw Error("cannot correlate zero frames");
  if (v.size() != static_cast<std::size_t>(stack.count()))
    throw Error("bucket length does not match pattern count");

  const auto m = static_cast<double>(v.size());
  double mean = 0.0;
  for (double y : v.values()) mean += y;
  mean /= m;

  // sum_k S_k (y_k - <y>) / M equals <S y> - <S><y> since the centered
  // readings sum to zero.
  const int n = stack.pixels();
  std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
  const bool direct = !stack.has_master() && stack.offset() == Offset{};
  for (int k = 0; k < stack.count(); ++k) {
    const double w = v[static_cast<std::size_t>(k)] - mean;
    if (direct) {
      const auto cv = stack.canvas(k);
      for (int i = 0; i < n; ++i) acc[i] += cv[i] * w;
    } else {
      for (int r = 0; r < stack.rows(); ++r)
        for (int c = 0; c < stack.cols(); ++c)
          acc[static_cast<std::size_t>(r) * stack.cols() + c] += stack.value(k, r, c) * w;
    }
  }
  for (double& a : acc) a /= m;
  return SignedMap(stack.rows(), stack.cols(), std::move(acc));
}

ReconstructionResult edge_by_correlation(const ChannelSet& channels, const PatternStack& stack) {
  check_lengths(channels, static_cast<std::size_t>(stack.count()));
  ReconstructionResult result;
  result.method = channels.is_sobel() ? Method::kSsgi : Method::kGgi;
  for (const auto& c : channels.channels()) result.channels.push_back(correlate(stack, c));
  result.edge = fuse(result.channels);
  return result;
}

ReconstructionResult edge_by_cs(const MeasurementMatrix& a, const ChannelSet& channels,
                                const SolverOptions& opts) {
  check_lengths(channels, static_cast<std::size_t>(a.measurements()));
  ReconstructionResult result;
  result.method = Method::kCgei;
  for (const auto& c : channels.channels()) {
    TvSolution sol = solve_tv(a, c.values(), opts);
    result.flagged = result.flagged || !sol.diagnostics.converged;
    result.channels.push_back(unflatten(sol.x, a.pattern_rows, a.pattern_cols));
    result.diagnostics.push_back(std::move(sol.diagnostics));
  }
  result.edge = fuse(result.channels);
  return result;
}

ReconstructionResult csgi_edge(const MeasurementMatrix& a, const BucketVector& raw,
                               EdgeOperator op, const SolverOptions& opts) {
  if (raw.tag() != ChannelTag::raw({0, 0})) throw Error("CSGI needs the unshifted readings");
  if (raw.size() != static_cast<std::size_t>(a.measurements()))
    throw Error("bucket length does not match pattern count");
  ReconstructionResult result;
  result.method = Method::kCsgi;
  TvSolution sol = solve_tv(a, raw.values(), opts);
  result.flagged = !sol.diagnostics.converged;
  Grid image = unflatten(sol.x, a.pattern_rows, a.pattern_cols);
  result.diagnostics.push_back(std::move(sol.diagnostics));
  if (op.kind == EdgeOperator::Kind::kSobel) {
    result.edge = sobel_reference(image, ShiftMode::kPeriodic).magnitude;
  } else {
    result.edge = magnitude(gradient_reference(image, op.phi, ShiftMode::kPeriodic));
  }
  result.channels.push_back(std::move(image));
  return result;
}

}  // namespace cgei
