#pragma once

// Independent reference implementations and random generators for tests.
// Nothing here calls into the library code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "cgei/image.hpp"
#include "cgei/speckle.hpp"

namespace cgei::testing {

inline Grid random_grid(std::mt19937_64& rng, int rows, int cols, double lo = 0.0,
                        double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Grid g(rows, cols);
  for (double& v : g.values()) v = u(rng);
  return g;
}

inline Image random_image(std::mt19937_64& rng, int rows, int cols) {
  return Image(random_grid(rng, rows, cols));
}

inline Image random_binary_image(std::mt19937_64& rng, int rows, int cols) {
  std::bernoulli_distribution b(0.5);
  Grid g(rows, cols);
  for (double& v : g.values()) v = b(rng) ? 1.0 : 0.0;
  return Image(std::move(g));
}

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

// Dense 3x3 correlation with periodic wrap: out(x,y) = sum k(i,j) T(x+i-1, y+j-1).
inline Grid dense_correlate3(const Grid& t, const double (&k)[3][3]) {
  Grid out(t.rows(), t.cols());
  for (int x = 0; x < t.rows(); ++x)
    for (int y = 0; y < t.cols(); ++y) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          s += k[i][j] * t(wrap(x + i - 1, t.rows()), wrap(y + j - 1, t.cols()));
      out(x, y) = s;
    }
  return out;
}

// Row x-1 weighted +{1,2,1}, row x+1 weighted -{1,2,1}.
inline constexpr double kSobelH[3][3] = {{1, 2, 1}, {0, 0, 0}, {-1, -2, -1}};
// Column y-1 weighted +{1,2,1}, column y+1 weighted -{1,2,1}.
inline constexpr double kSobelV[3][3] = {{1, 0, -1}, {2, 0, -2}, {1, 0, -1}};

inline Grid oracle_sobel_h(const Grid& t) { return dense_correlate3(t, kSobelH); }
inline Grid oracle_sobel_v(const Grid& t) { return dense_correlate3(t, kSobelV); }

// D T(p) = T(p + (dx, dy)) - T(p), periodic.
inline Grid oracle_difference(const Grid& t, int dx, int dy) {
  Grid out(t.rows(), t.cols());
  for (int x = 0; x < t.rows(); ++x)
    for (int y = 0; y < t.cols(); ++y)
      out(x, y) = t(wrap(x + dx, t.rows()), wrap(y + dy, t.cols())) - t(x, y);
  return out;
}

inline double oracle_bucket(const Grid& s, const Grid& t) {
  long double acc = 0.0L;
  for (int x = 0; x < s.rows(); ++x)
    for (int y = 0; y < s.cols(); ++y)
      acc += static_cast<long double>(s(x, y)) * static_cast<long double>(t(x, y));
  return static_cast<double>(acc);
}

inline double max_abs_diff(const Grid& a, const Grid& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
  return worst;
}

inline double relative_l2(std::span<const double> x, std::span<const double> ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - ref[i]) * (x[i] - ref[i]);
    den += ref[i] * ref[i];
  }
  return std::sqrt(num / den);
}

inline MeasurementMatrix gaussian_matrix(std::mt19937_64& rng, int m, int rows, int cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  MeasurementMatrix a{rows, cols, Matrix(m, rows * cols)};
  for (Eigen::Index i = 0; i < a.a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.a.cols(); ++j) a.a(i, j) = n(rng);
  return a;
}

// Pearson correlation written out longhand.
inline double oracle_ncc(const Grid& a, const Grid& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a.values()[i];
    mb += b.values()[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a.values()[i] - ma, db = b.values()[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace cgei::testing
