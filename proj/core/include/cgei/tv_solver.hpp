#pragma once

#include <span>
#include <string>
#include <vector>

#include "cgei/speckle.hpp"

namespace cgei {

enum class TvFlavor { kAnisotropic, kIsotropic };

std::string to_string(TvFlavor f);
TvFlavor parse_tv_flavor(const std::string& text);

/// How A and Y are rescaled before solving.
enum class Normalization {
  kNone,      ///< solve with A, Y and mu as given
  kSpectral,  ///< divide A and Y by ||A||_2, then bring range(Y) into [0.5, 1.5]
};

std::string to_string(Normalization n);
Normalization parse_normalization(const std::string& text);

struct SolverOptions {
  double mu = 4096.0;  ///< fidelity weight, 2^12
  TvFlavor tv = TvFlavor::kAnisotropic;
  double outer_tol = 1e-4;  ///< relative change of X between outer iterations
  double inner_tol = 1e-4;  ///< relative change of X between inner steps
  int max_outer = 300;
  int max_inner = 100;
  double beta0 = 32.0;  ///< 2^5
  double beta_growth = 2.0;
  double beta_max = 8192.0;  ///< 2^13
  Normalization normalization = Normalization::kSpectral;

  void validate() const;
};

struct SolveDiagnostics {
  int outer_iterations = 0;
  int inner_iterations = 0;
  /// Objective of the outer iterates, in the units of the caller's A and Y
  /// with `effective_mu` as the fidelity weight. Entry 0 is the initial guess.
  std::vector<double> objective_trace;
  double residual = 0.0;  ///< ||Y - A X||_2
  bool converged = false;
  /// Weight under which the returned X minimizes the unnormalized problem;
  /// equals `mu` when normalization is off.
  double effective_mu = 0.0;
  double final_beta = 0.0;
  /// Outer candidates that raised the objective and were discarded.
  int rejected_iterations = 0;
};

struct TvSolution {
  Vector x;
  SolveDiagnostics diagnostics;
};

/// min ||D X||_1 + (mu/2) ||Y - A X||_2^2 with D the periodic forward
/// difference on the pattern grid.
///
/// Augmented Lagrangian on the split W = D X: shrinkage on W, a
/// Barzilai-Borwein gradient step with nonmonotone backtracking on X, and a
/// multiplier update once the inner loop settles; beta follows the configured
/// continuation. X starts at A^T Y / M, multipliers at zero.
///
/// An outer candidate that raises the objective is discarded and the next
/// inner loop restarts from the incumbent, so the objective trace never
/// increases; discarded candidates are counted in the diagnostics.
///
/// Throws on non-finite iterates. Hitting max_outer returns the best iterate
/// with converged = false.
TvSolution solve_tv(const MeasurementMatrix& a, std::span<const double> y,
                    const SolverOptions& opts = {});

/// ||D x||_1 (anisotropic) or sum of per-pixel gradient norms (isotropic),
/// periodic boundary.
double total_variation(std::span<const double> x, int rows, int cols, TvFlavor flavor);

/// TV objective with opts.mu and opts.tv; normalization is ignored.
double tv_objective(const MeasurementMatrix& a, std::span<const double> y,
                    std::span<const double> x, const SolverOptions& opts);

/// Largest singular value of A by power iteration on A^T A.
double spectral_norm(const Matrix& a);

}  // namespace cgei
