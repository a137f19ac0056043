#include <Eigen/Dense>

#include <algorithm>

#include "smoothbench/error.hpp"
#include "smoothbench/smoothers.hpp"

namespace smoothbench {

namespace {

// One-step in-sample fitted values of an ARIMA(p, d, 0) with intercept, fitted by least
// squares. Entries before index p + d are left at zero.
std::vector<double> ar_fitted(std::span<const double> x, int p, int d) {
  const int n = static_cast<int>(x.size());
  std::vector<double> z(x.begin(), x.end());
  if (d == 1) {
    for (int t = n - 1; t > 0; --t) z[static_cast<std::size_t>(t)] -= z[static_cast<std::size_t>(t - 1)];
    z.erase(z.begin());
  }
  const int nz = static_cast<int>(z.size());
  const int rows = nz - p;
  Eigen::MatrixXd design(rows, p + 1);
  Eigen::VectorXd target(rows);
  for (int r = 0; r < rows; ++r) {
    const int k = r + p;
    design(r, 0) = 1.0;
    for (int lag = 1; lag <= p; ++lag) design(r, lag) = z[static_cast<std::size_t>(k - lag)];
    target(r) = z[static_cast<std::size_t>(k)];
  }
  // Rank-revealing solve: constant or collinear lags give the minimum-norm solution.
  const Eigen::VectorXd coef = design.completeOrthogonalDecomposition().solve(target);
  const Eigen::VectorXd zhat = design * coef;

  std::vector<double> fitted(x.size(), 0.0);
  for (int r = 0; r < rows; ++r) {
    const int t = r + p + d;
    fitted[static_cast<std::size_t>(t)] = zhat(r) + (d == 1 ? x[static_cast<std::size_t>(t - 1)] : 0.0);
  }
  return fitted;
}

}  // namespace

std::vector<double> ar_smoother(std::span<const double> x, int p, int d) {
  if (p < 1 || (d != 0 && d != 1)) throw Error(ErrorKind::InvalidParams, "ARI needs p >= 1 and d in {0, 1}");
  const int n = static_cast<int>(x.size());
  const int lead = p + d;
  if (n < 2 * p + d + 2) {
    throw Error(ErrorKind::SeriesTooShort, "ARI(p=" + std::to_string(p) + ", d=" + std::to_string(d) +
                                               ") needs at least " + std::to_string(2 * p + d + 2) + " samples");
  }
  auto out = ar_fitted(x, p, d);
  std::vector<double> reversed(x.rbegin(), x.rend());
  const auto back = ar_fitted(reversed, p, d);
  for (int i = 0; i < lead; ++i) {
    out[static_cast<std::size_t>(i)] = back[static_cast<std::size_t>(n - 1 - i)];
  }
  return out;
}

}  // namespace smoothbench
