#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smoothbench/timeseries.hpp"

namespace smoothbench {

enum class MethodId { TUK, KAL, FFT, SPL, KER, SMA, RRM, SUP, POL, SGF, ARI, ADP, GAM };

inline constexpr std::array<MethodId, 13> kAllMethods{
    MethodId::TUK, MethodId::KAL, MethodId::FFT, MethodId::SPL, MethodId::KER,
    MethodId::SMA, MethodId::RRM, MethodId::SUP, MethodId::POL, MethodId::SGF,
    MethodId::ARI, MethodId::ADP, MethodId::GAM};

enum class ParamKind { Real, Integer, OddInteger };

struct ParamBound {
  std::string_view name;
  double min;
  double max;
  ParamKind kind;
  std::string_view description;

  bool integral() const { return kind != ParamKind::Real; }
};

struct MethodInfo {
  MethodId id;
  std::string_view code;  // lowercase CLI code
  std::string_view name;
  std::span<const ParamBound> params;
  std::span<const double> defaults;
};

const MethodInfo& method_info(MethodId id);
std::optional<MethodId> parse_method(std::string_view code);
/// Upper-case three-letter label (SMA, TUK, ...).
std::string method_label(MethodId id);
/// Catalog parameter count; this is the k of the information criterion.
int parameter_count(MethodId id);
bool is_parametric(MethodId id);

struct SmootherSpec {
  MethodId method{MethodId::SMA};
  std::vector<double> params;

  std::span<const ParamBound> bounds() const { return method_info(method).params; }
  static SmootherSpec defaults(MethodId id);
  bool operator==(const SmootherSpec&) const = default;
};

/// Throws InvalidParams unless the parameters have the catalog length, lie in bounds and
/// respect integrality, parity and cross-parameter constraints.
void validate(const SmootherSpec& spec);

/// Snaps a raw parameter vector onto the feasible set: clamp, round integers, snap odd
/// windows to the nearest odd value, and enforce cross-parameter ordering.
std::vector<double> repair_params(MethodId id, std::vector<double> params);

/// Runs a catalog smoother on gap-free values.
std::vector<double> smooth(const SmootherSpec& spec, std::span<const double> x);

/// Same, on a time series; output keeps the input dates.
TimeSeries apply_smoother(const SmootherSpec& spec, const TimeSeries& series);

// Individual smoothers. All take gap-free values on a unit-step index.

/// Centered mean over a window truncated at the series ends.
std::vector<double> moving_average(std::span<const double> x, int window);

/// Running medians of an odd window until a fixpoint (or `max_passes`). Near the ends the
/// window shrinks symmetrically, so the end values are kept.
std::vector<double> repeated_running_median(std::span<const double> x, int window, int max_passes = 50);

/// Tukey 3R: medians of three repeated until nothing changes, end values copied.
std::vector<double> tukey_3r(std::span<const double> x);
TimeSeries smooth_tukey_3r(const TimeSeries& series);

struct LocalLevelFit {
  std::vector<double> smoothed;
  double q_var;  // level (state) noise variance
  double r_var;  // observation noise variance
  double log_likelihood;
};

/// Local-level Kalman filter plus RTS smoother with ML noise variances.
LocalLevelFit fit_local_level(std::span<const double> x);
/// Prediction-error log likelihood of the local-level model for fixed variances.
double local_level_log_likelihood(std::span<const double> x, double q_var, double r_var);
/// Filter and RTS smoother for fixed variances.
std::vector<double> local_level_smooth(std::span<const double> x, double q_var, double r_var);

struct FitKalmanResult {
  TimeSeries smoothed;
  double q_var;
  double r_var;
};
FitKalmanResult fit_kalman_local_level(const TimeSeries& series);

/// Keeps the lowest frequencies holding at least `energy_fraction` of non-DC spectral energy.
std::vector<double> fourier_lowpass(std::span<const double> x, double energy_fraction = 0.9);

/// Cubic smoothing spline minimizing sum (y - f)^2 + lambda * int f''^2.
std::vector<double> smoothing_spline(std::span<const double> x, double lambda);

/// Nadaraya-Watson regression with a Gaussian kernel of bandwidth `h`.
std::vector<double> kernel_regression(std::span<const double> x, double h);

/// Friedman's super smoother; `bass` in [0, 10] pulls spans toward the woofer.
std::vector<double> super_smoother(std::span<const double> x, double bass);

/// Local quadratic regression with tricube weights over `span_fraction` of the points.
std::vector<double> loess_quadratic(std::span<const double> x, double span_fraction);

/// Savitzky-Golay filter. Near the ends the full window is kept but shifted inwards.
std::vector<double> savitzky_golay(std::span<const double> x, int window, int degree);

/// Savitzky-Golay with per-point degree in [min_degree, max_degree] picked by an F test.
std::vector<double> adaptive_degree_filter(std::span<const double> x, int window, int min_degree,
                                           int max_degree, double alpha = 0.05);

/// In-sample one-step fit of an ARIMA(p, d, 0), leading values from the reversed series.
std::vector<double> ar_smoother(std::span<const double> x, int p, int d);

struct GamFit {
  std::vector<double> fitted;
  double lambda;
  double edf;  // trace of the influence matrix
  double gcv;
};

/// Penalized cubic regression spline y ~ s(index) with `basis_dim` knots.
GamFit gam_smooth(std::span<const double> x, int basis_dim, double log10_lambda, bool auto_lambda);

}  // namespace smoothbench
