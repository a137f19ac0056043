#include <algorithm>
#include <cmath>

#include "smoothbench/error.hpp"
#include "smoothbench/smoothers.hpp"

namespace smoothbench {

namespace {

// Symmetric positive definite matrix with `bw` sub-diagonals, stored by diagonal:
// band[d][i] = A(i + d, i).
struct SymmetricBand {
  int n;
  int bw;
  std::vector<std::vector<double>> band;

  SymmetricBand(int size, int bandwidth)
      : n(size), bw(bandwidth), band(static_cast<std::size_t>(bandwidth + 1), std::vector<double>(static_cast<std::size_t>(size), 0.0)) {}

  double& at(int row, int col) { return band[static_cast<std::size_t>(row - col)][static_cast<std::size_t>(col)]; }

  // In-place banded Cholesky, A = L L^T, then solves for rhs.
  std::vector<double> solve(std::vector<double> rhs) {
    for (int j = 0; j < n; ++j) {
      double diag = at(j, j);
      for (int k = std::max(0, j - bw); k < j; ++k) diag -= at(j, k) * at(j, k);
      if (!(diag > 0.0)) throw Error(ErrorKind::Internal, "spline system not positive definite");
      const double ljj = std::sqrt(diag);
      at(j, j) = ljj;
      for (int i = j + 1; i <= std::min(n - 1, j + bw); ++i) {
        double v = at(i, j);
        for (int k = std::max(0, i - bw); k < j; ++k) v -= at(i, k) * at(j, k);
        at(i, j) = v / ljj;
      }
    }
    for (int i = 0; i < n; ++i) {
      double v = rhs[static_cast<std::size_t>(i)];
      for (int k = std::max(0, i - bw); k < i; ++k) v -= at(i, k) * rhs[static_cast<std::size_t>(k)];
      rhs[static_cast<std::size_t>(i)] = v / at(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
      double v = rhs[static_cast<std::size_t>(i)];
      for (int k = i + 1; k <= std::min(n - 1, i + bw); ++k) v -= at(k, i) * rhs[static_cast<std::size_t>(k)];
      rhs[static_cast<std::size_t>(i)] = v / at(i, i);
    }
    return rhs;
  }
};

}  // namespace

// Reinsch's formulation on unit knot spacing: (R + lambda Q^T Q) gamma = Q^T y and
// f = y - lambda Q gamma, where gamma holds the second derivatives at interior knots.
std::vector<double> smoothing_spline(std::span<const double> y, double lambda) {
  const int n = static_cast<int>(y.size());
  if (n < 3) throw Error(ErrorKind::SeriesTooShort, "smoothing spline needs at least 3 samples");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::InvalidParams, "spline penalty must be finite and nonnegative");
  }
  const int m = n - 2;
  SymmetricBand a(m, 2);
  for (int i = 0; i < m; ++i) {
    a.at(i, i) = 2.0 / 3.0 + 6.0 * lambda;
    if (i + 1 < m) a.at(i + 1, i) = 1.0 / 6.0 - 4.0 * lambda;
    if (i + 2 < m) a.at(i + 2, i) = lambda;
  }
  std::vector<double> rhs(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const auto u = static_cast<std::size_t>(j);
    rhs[u] = y[u] - 2.0 * y[u + 1] + y[u + 2];
  }
  const auto gamma = a.solve(std::move(rhs));
  std::vector<double> f(y.begin(), y.end());
  for (int i = 0; i < n; ++i) {
    double qg = 0.0;
    if (i < m) qg += gamma[static_cast<std::size_t>(i)];
    if (i - 1 >= 0 && i - 1 < m) qg -= 2.0 * gamma[static_cast<std::size_t>(i - 1)];
    if (i - 2 >= 0 && i - 2 < m) qg += gamma[static_cast<std::size_t>(i - 2)];
    f[static_cast<std::size_t>(i)] -= lambda * qg;
  }
  return f;
}

}  // namespace smoothbench
