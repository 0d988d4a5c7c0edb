#include "cgei/tv_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cgei {

namespace {

// Periodic forward differences on a rows x cols grid; the result stacks the
// row-direction component (first N) and the column-direction component.
class Gradient {
 public:
  Gradient(int rows, int cols) : rows_(rows), cols_(cols) {}

  Vector apply(const Vector& x) const {
    const Eigen::Index n = x.size();
    Vector out(2 * n);
    for (int r = 0; r < rows_; ++r) {
      const int rn = r + 1 == rows_ ? 0 : r + 1;
      for (int c = 0; c < cols_; ++c) {
        const int cn = c + 1 == cols_ ? 0 : c + 1;
        const Eigen::Index i = idx(r, c);
        out[i] = x[idx(rn, c)] - x[i];
        out[n + i] = x[idx(r, cn)] - x[i];
      }
    }
    return out;
  }

  Vector adjoint(const Vector& p) const {
    const Eigen::Index n = p.size() / 2;
    Vector out(n);
    for (int r = 0; r < rows_; ++r) {
      const int rp = r == 0 ? rows_ - 1 : r - 1;
      for (int c = 0; c < cols_; ++c) {
        const int cp = c == 0 ? cols_ - 1 : c - 1;
        const Eigen::Index i = idx(r, c);
        out[i] = p[idx(rp, c)] - p[i] + p[n + idx(r, cp)] - p[n + i];
      }
    }
    return out;
  }

 private:
  Eigen::Index idx(int r, int c) const { return static_cast<Eigen::Index>(r) * cols_ + c; }

  int rows_;
  int cols_;
};

double tv_of_gradient(const Vector& g, TvFlavor flavor) {
  const Eigen::Index n = g.size() / 2;
  if (flavor == TvFlavor::kAnisotropic) return g.cwiseAbs().sum();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) sum += std::hypot(g[i], g[n + i]);
  return sum;
}

// prox of (1/beta)|.| applied to v, per component or per pixel pair.
Vector shrink(const Vector& v, double beta, TvFlavor flavor) {
  const double t = 1.0 / beta;
  Vector out(v.size());
  if (flavor == TvFlavor::kAnisotropic) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double a = std::abs(v[i]) - t;
      out[i] = a > 0.0 ? std::copysign(a, v[i]) : 0.0;
    }
    return out;
  }
  const Eigen::Index n = v.size() / 2;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = std::hypot(v[i], v[n + i]);
    const double scale = norm > t ? (norm - t) / norm : 0.0;
    out[i] = scale * v[i];
    out[n + i] = scale * v[n + i];
  }
  return out;
}

constexpr double kArmijo = 1e-5;
constexpr double kBacktrack = 0.6;
constexpr double kNonmonotone = 0.9995;

bool all_finite(const Vector& v) { return v.allFinite(); }

void require_finite(const Vector& v, int iteration) {
  if (!all_finite(v))
    throw Error("non-finite value in TV solver at outer iteration " + std::to_string(iteration));
}

}  // namespace

std::string to_string(TvFlavor f) {
  return f == TvFlavor::kAnisotropic ? "anisotropic" : "isotropic";
}

TvFlavor parse_tv_flavor(const std::string& text) {
  if (text == "anisotropic") return TvFlavor::kAnisotropic;
  if (text == "isotropic") return TvFlavor::kIsotropic;
  throw Error("unknown TV flavor: " + text);
}

std::string to_string(Normalization n) { return n == Normalization::kNone ? "none" : "spectral"; }

Normalization parse_normalization(const std::string& text) {
  if (text == "none") return Normalization::kNone;
  if (text == "spectral") return Normalization::kSpectral;
  throw Error("unknown normalization: " + text);
}

void SolverOptions::validate() const {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw Error("mu must be a finite nonnegative number");
  if (!(outer_tol > 0.0) || !(inner_tol > 0.0)) throw Error("solver tolerances must be positive");
  if (max_outer < 1 || max_inner < 1) throw Error("solver iteration caps must be at least 1");
  if (!(beta0 > 0.0) || !(beta_growth >= 1.0) || !(beta_max >= beta0))
    throw Error("invalid beta schedule");
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Vector v = Vector::Ones(a.cols()) / std::sqrt(static_cast<double>(a.cols()));
  double sigma2 = 0.0;
  for (int it = 0; it < 100; ++it) {
    Vector w = a.transpose() * (a * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    const double change = std::abs(norm - sigma2);
    sigma2 = norm;
    if (change <= 1e-9 * norm) break;
  }
  return std::sqrt(sigma2);
}

double total_variation(std::span<const double> x, int rows, int cols, TvFlavor flavor) {
  if (x.size() != static_cast<std::size_t>(rows) * cols) throw Error("vector length mismatch");
  const Vector xv = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
  return tv_of_gradient(Gradient(rows, cols).apply(xv), flavor);
}

double tv_objective(const MeasurementMatrix& a, std::span<const double> y,
                    std::span<const double> x, const SolverOptions& opts) {
  if (static_cast<Eigen::Index>(x.size()) != a.a.cols() ||
      static_cast<Eigen::Index>(y.size()) != a.a.rows())
    throw Error("dimension mismatch in TV objective");
  const auto xv = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
  const auto yv = Eigen::Map<const Vector>(y.data(), static_cast<Eigen::Index>(y.size()));
  const double fidelity = (yv - a.a * xv).squaredNorm();
  return total_variation(x, a.pattern_rows, a.pattern_cols, opts.tv) + 0.5 * opts.mu * fidelity;
}

TvSolution solve_tv(const MeasurementMatrix& a, std::span<const double> y_in,
                    const SolverOptions& opts) {
  opts.validate();
  const Eigen::Index m = a.a.rows();
  const Eigen::Index n = a.a.cols();
  if (n != static_cast<Eigen::Index>(a.pattern_rows) * a.pattern_cols)
    throw Error("measurement matrix columns do not match the pattern grid");
  if (static_cast<Eigen::Index>(y_in.size()) != m)
    throw Error("bucket vector length does not match measurement count");
  if (m == 0) throw Error("empty measurement matrix");

  const Vector y_raw = Eigen::Map<const Vector>(y_in.data(), m);
  const Gradient grad(a.pattern_rows, a.pattern_cols);

  // Work in normalized units: A_s = A / a_scale, y_s = y * y_scale / a_scale,
  // x_s = y_scale * x.
  double a_scale = 1.0;
  double y_scale = 1.0;
  if (opts.normalization == Normalization::kSpectral) {
    a_scale = spectral_norm(a.a);
    if (a_scale == 0.0) a_scale = 1.0;
    const double range = (y_raw.maxCoeff() - y_raw.minCoeff()) / a_scale;
    if (range > 0.0 && range < 0.5) y_scale = 0.5 / range;
    if (range > 1.5) y_scale = 1.5 / range;
  }
  const double mu = opts.mu;
  const double effective_mu = mu * y_scale / (a_scale * a_scale);
  const Vector y = y_raw * (y_scale / a_scale);

  auto apply_a = [&](const Vector& x) -> Vector { return (a.a * x) / a_scale; };
  auto apply_at = [&](const Vector& r) -> Vector { return (a.a.transpose() * r) / a_scale; };

  // Objective in caller units for the trace.
  auto raw_objective = [&](const Vector& dx, const Vector& ax_minus_y) {
    return (tv_of_gradient(dx, opts.tv) + 0.5 * mu * ax_minus_y.squaredNorm()) / y_scale;
  };

  TvSolution sol;
  SolveDiagnostics& diag = sol.diagnostics;
  diag.effective_mu = effective_mu;

  Vector x = (a.a.transpose() * y_raw) * (y_scale / static_cast<double>(m));
  Vector ax = apply_a(x);
  Vector dx = grad.apply(x);
  require_finite(x, 0);
  Vector nu = Vector::Zero(2 * n);
  double beta = opts.beta0;

  double objective = raw_objective(dx, ax - y);
  diag.objective_trace.push_back(objective);

  // Augmented Lagrangian in x for fixed w, nu, beta.
  auto lagrangian = [&](const Vector& d, const Vector& w, const Vector& r) {
    const Vector gap = d - w;
    return -nu.dot(gap) + 0.5 * beta * gap.squaredNorm() + 0.5 * mu * r.squaredNorm();
  };

  Vector x_prev_step;
  Vector g_prev;
  for (int outer = 1; outer <= opts.max_outer; ++outer) {
    const Vector x_outer_start = x;
    Vector w = shrink(dx - nu / beta, beta, opts.tv);
    // Zhang-Hager reference value for the nonmonotone acceptance test.
    double ref = lagrangian(dx, w, ax - y);
    double ref_weight = 1.0;
    for (int inner = 0; inner < opts.max_inner; ++inner) {
      const Vector r = ax - y;
      const Vector g = beta * grad.adjoint(dx - w) - grad.adjoint(nu) + mu * apply_at(r);
      const double gg = g.squaredNorm();
      if (gg == 0.0) break;

      const Vector ag = apply_a(g);
      const Vector dg_dir = grad.apply(g);

      // Barzilai-Borwein length from the previous step, else the exact
      // minimizer of the quadratic along -g.
      const double curvature = beta * dg_dir.squaredNorm() + mu * ag.squaredNorm();
      double alpha = curvature > 0.0 ? gg / curvature : 1.0;
      if (x_prev_step.size() == n) {
        const Vector s = x - x_prev_step;
        const Vector dg = g - g_prev;
        const double sy = s.dot(dg);
        if (sy > 0.0) alpha = s.squaredNorm() / sy;
      }

      double f_new = 0.0;
      for (int bt = 0; bt < 40; ++bt) {
        f_new = lagrangian(dx - alpha * dg_dir, w, r - alpha * ag);
        if (f_new <= ref - kArmijo * alpha * gg) break;
        alpha *= kBacktrack;
      }

      x_prev_step = x;
      g_prev = g;
      x -= alpha * g;
      ax -= alpha * ag;
      dx -= alpha * dg_dir;
      ++diag.inner_iterations;
      require_finite(x, outer);

      w = shrink(dx - nu / beta, beta, opts.tv);
      const double f_w = lagrangian(dx, w, ax - y);
      const double next_weight = kNonmonotone * ref_weight + 1.0;
      ref = (kNonmonotone * ref_weight * ref + f_w) / next_weight;
      ref_weight = next_weight;

      const double step = alpha * std::sqrt(gg);
      if (step <= opts.inner_tol * std::max(x.norm(), 1e-12)) break;
    }

    // keep ax in sync to limit drift from the incremental updates
    ax = apply_a(x);
    dx = grad.apply(x);
    w = shrink(dx - nu / beta, beta, opts.tv);
    nu -= beta * (dx - w);
    beta = std::min(beta * opts.beta_growth, opts.beta_max);
    require_finite(nu, outer);
    diag.outer_iterations = outer;

    const double change = (x - x_outer_start).norm() / std::max(x_outer_start.norm(), 1e-12);
    const double candidate = raw_objective(dx, ax - y);
    if (candidate <= objective) {
      objective = candidate;
    } else {
      // Safeguard: the next inner loop restarts from the incumbent.
      ++diag.rejected_iterations;
      x = x_outer_start;
      ax = apply_a(x);
      dx = grad.apply(x);
      x_prev_step.resize(0);
      g_prev.resize(0);
    }
    diag.objective_trace.push_back(objective);

    if (change < opts.outer_tol || x.norm() == 0.0) {
      diag.converged = true;
      break;
    }
  }

  diag.final_beta = beta;
  sol.x = x / y_scale;
  diag.residual = (y_raw - a.a * sol.x).norm();
  return sol;
}

}  // namespace cgei
