#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "smoothbench/error.hpp"
#include "smoothbench/smoothers.hpp"

namespace smoothbench {

// Each point gets a weighted quadratic fit over its q = ceil(span * n) nearest neighbours
// (at least 4). The tricube radius is the q-th neighbour distance plus one sample so that
// all q neighbours carry positive weight.
std::vector<double> loess_quadratic(std::span<const double> y, double span_fraction) {
  if (!(span_fraction > 0.0 && span_fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidParams, "loess span must lie in (0, 1]");
  }
  const int n = static_cast<int>(y.size());
  if (n < 4) throw Error(ErrorKind::SeriesTooShort, "local quadratic fit needs at least 4 samples");
  const int q = std::clamp(static_cast<int>(std::ceil(span_fraction * n - 1e-9)), 4, n);

  std::vector<double> out(y.size());
  for (int i = 0; i < n; ++i) {
    // q nearest indices to i form a contiguous block [lo, lo + q).
    int lo = std::clamp(i - (q - 1) / 2, 0, n - q);
    while (lo > 0 && i - (lo - 1) < (lo + q - 1) - i) --lo;
    while (lo + q < n && (lo + q) - i < i - lo) ++lo;
    const int dq = std::max(i - lo, lo + q - 1 - i);
    const double radius = dq + 1.0;

    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atb = Eigen::Vector3d::Zero();
    for (int j = std::max(0, i - dq); j <= std::min(n - 1, i + dq); ++j) {
      const double d = std::abs(j - i) / radius;
      if (d >= 1.0) continue;
      const double t = 1.0 - d * d * d;
      const double w = t * t * t;
      // Centered, scaled abscissa keeps the normal equations well conditioned.
      const double u = (j - i) / radius;
      const Eigen::Vector3d row(1.0, u, u * u);
      ata.noalias() += w * row * row.transpose();
      atb.noalias() += w * row * y[static_cast<std::size_t>(j)];
    }
    const Eigen::Vector3d coef = ata.ldlt().solve(atb);
    out[static_cast<std::size_t>(i)] = coef[0];
  }
  return out;
}

}  // namespace smoothbench
