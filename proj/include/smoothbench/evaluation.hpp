#pragma once

#include <Eigen/Core>

#include "smoothbench/smoothers.hpp"
#include "smoothbench/timeseries.hpp"

namespace smoothbench {

/// T x T matrix whose column t is the smoothed series computed with sample t deleted
/// (and refilled by linear imputation).
struct LoocvMatrix {
  Eigen::MatrixXd m;
  TimeSeries source;

  std::size_t size() const { return static_cast<std::size_t>(m.rows()); }
};

enum class AicSign {
  Paper,     // T ln(SSE / T) - 2k
  Standard,  // T ln(SSE / T) + 2k
};

struct PerformanceIndex {
  MethodId method{MethodId::SMA};
  int k = 0;
  double mae = 0.0;
  double var = 0.0;
  double aic = 0.0;             // -infinity when the residuals vanish
  bool zero_residual = false;

  bool operator==(const PerformanceIndex&) const = default;
};

/// Requires a gap-free series with at least 5 samples.
LoocvMatrix build_loocv_matrix(const SmootherSpec& spec, const TimeSeries& series);

double mae(const LoocvMatrix& loocv);
/// Sum over rows of the row sample variance (divisor T - 1).
double var_index(const LoocvMatrix& loocv);

struct AicValue {
  double value;  // -infinity with zero_residual set
  bool zero_residual;
};
AicValue aic(const LoocvMatrix& loocv, int k, AicSign sign = AicSign::Paper);

struct Band {
  TimeSeries lower;
  TimeSeries upper;
};
/// Row-wise percentiles (1 - level) / 2 and (1 + level) / 2 of the matrix.
Band confidence_band(const LoocvMatrix& loocv, double level);

PerformanceIndex evaluate_method(const SmootherSpec& spec, const TimeSeries& series,
                                 AicSign sign = AicSign::Paper);
/// Indices from an existing matrix.
PerformanceIndex performance_index(MethodId method, const LoocvMatrix& loocv, AicSign sign = AicSign::Paper);

}  // namespace smoothbench
