#include <Eigen/Dense>
#include <boost/math/distributions/fisher_f.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "smoothbench/error.hpp"
#include "smoothbench/smoothers.hpp"

namespace smoothbench {

namespace {

// Hat matrix of a degree-d least-squares polynomial on w equally spaced points, with
// abscissae centered on `center` (0..w-1) and scaled by the half width.
Eigen::MatrixXd polynomial_hat(int w, int degree, int center) {
  const double half = std::max(1.0, (w - 1) / 2.0);
  Eigen::MatrixXd v(w, degree + 1);
  for (int r = 0; r < w; ++r) {
    const double u = (r - center) / half;
    double p = 1.0;
    for (int c = 0; c <= degree; ++c) {
      v(r, c) = p;
      p *= u;
    }
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(v);
  return v * qr.solve(Eigen::MatrixXd::Identity(w, w));
}

// Hat matrices are pure functions of (w, degree, center); memoized process-wide.
const Eigen::MatrixXd& cached_hat(int w, int degree, int center) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int>, Eigen::MatrixXd> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_tuple(w, degree, center);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, polynomial_hat(w, degree, center)).first;
  return it->second;
}

// Start of the w-point window used for sample i: centered, shifted inwards at the ends.
int window_start(int i, int w, int n) { return std::clamp(i - w / 2, 0, n - w); }

void check_window(int w, int n) {
  if (w < 1 || w % 2 == 0) throw Error(ErrorKind::InvalidParams, "window length must be odd");
  if (n < w) throw Error(ErrorKind::SeriesTooShort, "series shorter than the filter window");
}

}  // namespace

std::vector<double> savitzky_golay(std::span<const double> y, int window, int degree) {
  const int n = static_cast<int>(y.size());
  check_window(window, n);
  if (degree < 0 || degree >= window) {
    throw Error(ErrorKind::InvalidParams, "Savitzky-Golay degree must satisfy 0 <= d < w");
  }
  std::vector<double> out(y.size());
  for (int i = 0; i < n; ++i) {
    const int lo = window_start(i, window, n);
    const int offset = i - lo;
    const Eigen::MatrixXd& h = cached_hat(window, degree, offset);
    double acc = 0.0;
    for (int r = 0; r < window; ++r) acc += h(offset, r) * y[static_cast<std::size_t>(lo + r)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

// Backward selection: start at the highest degree and drop one degree at a time while the
// top coefficient fails an F(1, w - d - 1) test at level alpha. Testing upwards instead
// stalls at symmetric extrema, where the linear term vanishes but curvature does not. The
// highest degree is capped at w - 2 so the test keeps a residual degree of freedom.
std::vector<double> adaptive_degree_filter(std::span<const double> y, int window, int min_degree,
                                           int max_degree, double alpha) {
  const int n = static_cast<int>(y.size());
  check_window(window, n);
  if (min_degree < 0 || max_degree < min_degree) {
    throw Error(ErrorKind::InvalidParams, "adaptive filter needs 0 <= dmin <= dmax");
  }
  const int top = std::min(max_degree, window - 2);
  const int bottom = std::min(min_degree, top);

  std::vector<double> critical(static_cast<std::size_t>(top + 1), 0.0);
  for (int d = bottom + 1; d <= top; ++d) {
    const boost::math::fisher_f dist(1.0, static_cast<double>(window - d - 1));
    critical[static_cast<std::size_t>(d)] = boost::math::quantile(dist, 1.0 - alpha);
  }

  std::vector<double> out(y.size());
  Eigen::VectorXd local(window);
  for (int i = 0; i < n; ++i) {
    const int lo = window_start(i, window, n);
    const int offset = i - lo;
    for (int r = 0; r < window; ++r) local(r) = y[static_cast<std::size_t>(lo + r)];
    const double sst = (local.array() - local.mean()).square().sum();
    const double tiny = 1e-14 * sst;

    auto fit = [&](int degree, double& value) {
      const Eigen::VectorXd fitted = cached_hat(window, degree, offset) * local;
      value = fitted(offset);
      return (local - fitted).squaredNorm();
    };
    double value = 0.0;
    double rss = fit(top, value);
    for (int d = top; d > bottom; --d) {
      double lower_value = 0.0;
      const double rss_lower = fit(d - 1, lower_value);
      const double drop = rss_lower - rss;
      const bool significant =
          rss <= tiny ? drop > tiny
                      : drop / (rss / (window - d - 1)) > critical[static_cast<std::size_t>(d)];
      if (significant) break;
      value = lower_value;
      rss = rss_lower;
    }
    out[static_cast<std::size_t>(i)] = value;
  }
  return out;
}

}  // namespace smoothbench
