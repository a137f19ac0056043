#include "smoothbench/evaluation.hpp"

#include <cmath>
#include <limits>

#include "smoothbench/error.hpp"

namespace smoothbench {

LoocvMatrix build_loocv_matrix(const SmootherSpec& spec, const TimeSeries& series) {
  const std::size_t n = series.size();
  if (n < 5) throw Error(ErrorKind::SeriesTooShort, "cross-validation needs at least 5 samples");
  if (series.has_missing()) {
    throw Error(ErrorKind::InsufficientData, "cross-validation needs a gap-free series");
  }
  validate(spec);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t t = 0; t < n; ++t) {
    const auto filled = impute_linear(series.with_missing(t)).values();
    const auto col = smooth(spec, filled);
    for (std::size_t i = 0; i < n; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = col[i];
  }
  return {std::move(m), series};
}

double mae(const LoocvMatrix& loocv) {
  const auto n = static_cast<Eigen::Index>(loocv.size());
  double sum = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    sum += std::fabs(loocv.m(t, t) - *loocv.source[static_cast<std::size_t>(t)].value);
  }
  return sum / static_cast<double>(n);
}

double var_index(const LoocvMatrix& loocv) {
  const auto n = loocv.m.cols();
  double total = 0.0;
  for (Eigen::Index t = 0; t < loocv.m.rows(); ++t) {
    const double mean = loocv.m.row(t).mean();
    total += (loocv.m.row(t).array() - mean).square().sum() / static_cast<double>(n - 1);
  }
  return total;
}

AicValue aic(const LoocvMatrix& loocv, int k, AicSign sign) {
  const auto n = static_cast<Eigen::Index>(loocv.size());
  double sse = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double r = loocv.m(t, t) - *loocv.source[static_cast<std::size_t>(t)].value;
    sse += r * r;
  }
  if (sse < 1e-300) return {-std::numeric_limits<double>::infinity(), true};
  const double penalty = 2.0 * k;
  const double base = static_cast<double>(n) * std::log(sse / static_cast<double>(n));
  return {sign == AicSign::Paper ? base - penalty : base + penalty, false};
}

Band confidence_band(const LoocvMatrix& loocv, double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::InvalidParams, "band level must lie in (0, 1)");
  const auto n = loocv.size();
  std::vector<double> lower(n), upper(n), row(n);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = loocv.m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j));
    }
    lower[t] = percentile(row, (1.0 - level) / 2.0);
    upper[t] = percentile(row, (1.0 + level) / 2.0);
  }
  return {loocv.source.with_values(lower), loocv.source.with_values(upper)};
}

PerformanceIndex performance_index(MethodId method, const LoocvMatrix& loocv, AicSign sign) {
  PerformanceIndex pi;
  pi.method = method;
  pi.k = parameter_count(method);
  pi.mae = mae(loocv);
  pi.var = var_index(loocv);
  const auto a = aic(loocv, pi.k, sign);
  pi.aic = a.value;
  pi.zero_residual = a.zero_residual;
  return pi;
}

PerformanceIndex evaluate_method(const SmootherSpec& spec, const TimeSeries& series, AicSign sign) {
  return performance_index(spec.method, build_loocv_matrix(spec, series), sign);
}

}  // namespace smoothbench
