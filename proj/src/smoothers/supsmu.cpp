#include <algorithm>
#include <array>
#include <cmath>

#include "smoothbench/error.hpp"
#include "smoothbench/smoothers.hpp"

namespace smoothbench {

namespace {

constexpr std::array<double, 3> kSpans{0.05, 0.2, 0.5};  // tweeter, midrange, woofer

// Running-lines smoother with a fixed symmetric span, updated incrementally as the
// window slides. With `cv_residuals` set, also returns absolute leave-one-out residuals.
void running_lines(std::span<const double> x, std::span<const double> y, double span, double vsmlsq,
                   std::vector<double>& smo, std::vector<double>* cv_residuals) {
  const int n = static_cast<int>(x.size());
  int ibw = static_cast<int>(0.5 * span * n + 0.5);
  ibw = std::max(ibw, 2);
  const int it = std::min(2 * ibw + 1, n);

  double xm = 0.0, ym = 0.0, var = 0.0, cvar = 0.0, fbw = 0.0;
  auto add = [&](int j) {
    const double xj = x[static_cast<std::size_t>(j)], yj = y[static_cast<std::size_t>(j)];
    const double fbo = fbw;
    fbw += 1.0;
    xm = (fbo * xm + xj) / fbw;
    ym = (fbo * ym + yj) / fbw;
    const double tmp = fbo > 0.0 ? fbw * (xj - xm) / fbo : 0.0;
    var += tmp * (xj - xm);
    cvar += tmp * (yj - ym);
  };
  auto remove = [&](int j) {
    const double xj = x[static_cast<std::size_t>(j)], yj = y[static_cast<std::size_t>(j)];
    const double fbo = fbw;
    fbw -= 1.0;
    const double tmp = fbw > 0.0 ? fbo * (xj - xm) / fbw : 0.0;
    var -= tmp * (xj - xm);
    cvar -= tmp * (yj - ym);
    if (fbw > 0.0) {
      xm = (fbo * xm - xj) / fbw;
      ym = (fbo * ym - yj) / fbw;
    }
  };

  for (int i = 0; i < it; ++i) add(i);
  smo.assign(x.size(), 0.0);
  if (cv_residuals) cv_residuals->assign(x.size(), 0.0);
  for (int j = 0; j < n; ++j) {
    const int out = j - ibw - 1;
    const int in = j + ibw;
    if (out >= 0 && in < n) {
      remove(out);
      add(in);
    }
    const auto u = static_cast<std::size_t>(j);
    const double slope = var > vsmlsq ? cvar / var : 0.0;
    smo[u] = slope * (x[u] - xm) + ym;
    if (cv_residuals) {
      double h = fbw > 0.0 ? 1.0 / fbw : 0.0;
      if (var > vsmlsq) h += (x[u] - xm) * (x[u] - xm) / var;
      const double a = 1.0 - h;
      if (a > 0.0) {
        (*cv_residuals)[u] = std::fabs(y[u] - smo[u]) / a;
      } else if (j > 0) {
        (*cv_residuals)[u] = (*cv_residuals)[u - 1];
      }
    }
  }
}

}  // namespace

std::vector<double> super_smoother(std::span<const double> y, double bass) {
  if (!(bass >= 0.0 && bass <= 10.0)) throw Error(ErrorKind::InvalidParams, "bass must lie in [0, 10]");
  const std::size_t n = y.size();
  if (n < 5) throw Error(ErrorKind::SeriesTooShort, "super smoother needs at least 5 samples");
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i);

  const std::size_t q1 = n / 4;
  const double scale = static_cast<double>(2 * q1);
  const double vsmlsq = (1e-3 * scale) * (1e-3 * scale);

  std::array<std::vector<double>, 3> fits;
  std::array<std::vector<double>, 3> resid;
  std::vector<double> cv, scratch;
  for (std::size_t s = 0; s < 3; ++s) {
    running_lines(x, y, kSpans[s], vsmlsq, fits[s], &cv);
    running_lines(x, cv, kSpans[1], vsmlsq, resid[s], nullptr);
  }

  std::vector<double> best_span(n);
  for (std::size_t j = 0; j < n; ++j) {
    double resmin = 1e20;
    for (std::size_t s = 0; s < 3; ++s) {
      if (resid[s][j] < resmin) {
        resmin = resid[s][j];
        best_span[j] = kSpans[s];
      }
    }
    if (bass > 0.0 && resmin < resid[2][j] && resmin > 0.0) {
      best_span[j] += (kSpans[2] - best_span[j]) * std::pow(std::max(1e-7, resmin / resid[2][j]), 10.0 - bass);
    }
  }

  std::vector<double> spans;
  running_lines(x, best_span, kSpans[1], vsmlsq, spans, nullptr);
  std::vector<double> blended(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = std::clamp(spans[j], kSpans[0], kSpans[2]);
    double f = s - kSpans[1];
    if (f >= 0.0) {
      f /= (kSpans[2] - kSpans[1]);
      blended[j] = (1.0 - f) * fits[1][j] + f * fits[2][j];
    } else {
      f = -f / (kSpans[1] - kSpans[0]);
      blended[j] = (1.0 - f) * fits[1][j] + f * fits[0][j];
    }
  }
  std::vector<double> out;
  running_lines(x, blended, kSpans[0], vsmlsq, out, nullptr);
  return out;
}

}  // namespace smoothbench
