#pragma once

#include <string>
#include <vector>

#include "cgei/forward.hpp"
#include "cgei/image.hpp"
#include "cgei/speckle.hpp"
#include "cgei/tv_solver.hpp"

namespace cgei {

enum class Method {
  kGgi,   ///< gradient ghost imaging, correlation on one DIFF_PHI channel
  kSsgi,  ///< speckle-shifting ghost imaging, correlation on DIFF_H and DIFF_V
  kCgei,  ///< compressed ghost edge imaging, TV recovery of each channel
  kCsgi,  ///< TV recovery of the object, edge operator afterwards
};

std::string to_string(Method m);

/// Differential channels feeding one reconstruction: {DIFF_PHI} or
/// {DIFF_H, DIFF_V}.
class ChannelSet {
 public:
  explicit ChannelSet(BucketVector phi);
  ChannelSet(BucketVector horizontal, BucketVector vertical);

  const std::vector<BucketVector>& channels() const { return channels_; }
  bool is_sobel() const { return channels_.size() == 2; }
  std::size_t length() const { return channels_.front().size(); }

 private:
  std::vector<BucketVector> channels_;
};

/// Edge operator applied after image recovery in CSGI.
struct EdgeOperator {
  enum class Kind { kSobel, kGradient } kind = Kind::kSobel;
  int phi = 45;

  static EdgeOperator sobel() { return {Kind::kSobel, 0}; }
  static EdgeOperator gradient(int phi) { return {Kind::kGradient, phi}; }
};

struct ReconstructionResult {
  EdgeMap edge;
  Method method = Method::kSsgi;
  /// Per-channel signed maps before fusion (recovered image for CSGI).
  std::vector<SignedMap> channels;
  std::vector<SolveDiagnostics> diagnostics;
  /// Set when any solve stopped at max_outer without meeting its tolerance.
  bool flagged = false;

  int solver_iterations() const;
};

/// Pixelwise covariance <S y> - <S><y> over the M frames of `stack`.
SignedMap correlate(const PatternStack& stack, const BucketVector& v);

/// GGI (one channel, |.|) or SSGI (two channels, Euclidean magnitude).
ReconstructionResult edge_by_correlation(const ChannelSet& channels, const PatternStack& stack);

/// CGEI: one TV solve per channel, reshaped and fused like edge_by_correlation.
ReconstructionResult edge_by_cs(const MeasurementMatrix& a, const ChannelSet& channels,
                                const SolverOptions& opts = {});

/// CSGI: TV-recover the object from the unshifted readings, then apply `op`.
ReconstructionResult csgi_edge(const MeasurementMatrix& a, const BucketVector& raw,
                               EdgeOperator op, const SolverOptions& opts = {});

}  // namespace cgei
