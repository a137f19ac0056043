#include <cmath>

#include "smoothbench/error.hpp"
#include "smoothbench/smoothers.hpp"

namespace smoothbench {

std::vector<double> kernel_regression(std::span<const double> x, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidParams, "kernel bandwidth must be positive");
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  // Beyond 10 bandwidths the Gaussian weight is below 1e-21 of the peak.
  const auto reach = static_cast<std::ptrdiff_t>(std::ceil(10.0 * h));
  std::vector<double> weight(static_cast<std::size_t>(reach + 1));
  for (std::ptrdiff_t d = 0; d <= reach; ++d) {
    const double u = static_cast<double>(d) / h;
    weight[static_cast<std::size_t>(d)] = std::exp(-0.5 * u * u);
  }
  std::vector<double> out(x.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double num = 0.0, den = 0.0;
    for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - reach); j <= std::min(n - 1, i + reach); ++j) {
      const double w = weight[static_cast<std::size_t>(std::abs(i - j))];
      num += w * x[static_cast<std::size_t>(j)];
      den += w;
    }
    out[static_cast<std::size_t>(i)] = num / den;
  }
  return out;
}

}  // namespace smoothbench
