#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "smoothbench/error.hpp"
#include "smoothbench/smoothers.hpp"

namespace smoothbench {

namespace {

double sample_variance(std::span<const double> x) {
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() - 1);
}

}  // namespace

// The first observation initializes the level (diffuse prior), so the likelihood is the
// prediction-error decomposition over t = 2..T.
double local_level_log_likelihood(std::span<const double> x, double q_var, double r_var) {
  double level = x[0];
  double p = r_var;
  double ll = 0.0;
  for (std::size_t t = 1; t < x.size(); ++t) {
    const double p_pred = p + q_var;
    const double f = p_pred + r_var;
    const double v = x[t] - level;
    ll -= 0.5 * (std::log(2.0 * std::numbers::pi * f) + v * v / f);
    const double gain = p_pred / f;
    level += gain * v;
    p = p_pred * r_var / f;
  }
  return ll;
}

std::vector<double> local_level_smooth(std::span<const double> x, double q_var, double r_var) {
  const std::size_t n = x.size();
  std::vector<double> a(n), p(n);
  a[0] = x[0];
  p[0] = r_var;
  for (std::size_t t = 1; t < n; ++t) {
    const double p_pred = p[t - 1] + q_var;
    const double f = p_pred + r_var;
    a[t] = a[t - 1] + p_pred / f * (x[t] - a[t - 1]);
    p[t] = p_pred * r_var / f;
  }
  std::vector<double> s(n);
  s[n - 1] = a[n - 1];
  for (std::size_t t = n - 1; t-- > 0;) {
    const double gain = p[t] / (p[t] + q_var);
    s[t] = a[t] + gain * (s[t + 1] - a[t]);
  }
  return s;
}

LocalLevelFit fit_local_level(std::span<const double> x) {
  if (x.size() < 5) throw Error(ErrorKind::SeriesTooShort, "Kalman smoother needs at least 5 samples");
  const double var = sample_variance(x);
  const double scale = var > 0.0 ? var : 1.0;
  const double floor_log = std::log10(1e-9 * scale);
  const double ceil_log = std::log10(1e3 * scale);

  auto loglik = [&](double lq, double lr) {
    const double ll = local_level_log_likelihood(x, std::pow(10.0, lq), std::pow(10.0, lr));
    return std::isfinite(ll) ? ll : -std::numeric_limits<double>::infinity();
  };

  const double base = std::log10(scale);
  double best_q = base, best_r = base;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = -12; i <= 2; ++i) {
    for (int j = -12; j <= 2; ++j) {
      const double lq = base + 0.5 * i, lr = base + 0.5 * j;
      const double ll = loglik(lq, lr);
      if (ll > best) {
        best = ll;
        best_q = lq;
        best_r = lr;
      }
    }
  }
  // Coordinate descent on the log10 variances with a halving step.
  for (double step = 0.25; step > 1e-4; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int coord = 0; coord < 2; ++coord) {
        for (double dir : {-1.0, 1.0}) {
          double lq = best_q, lr = best_r;
          (coord == 0 ? lq : lr) += dir * step;
          lq = std::clamp(lq, floor_log, ceil_log);
          lr = std::clamp(lr, floor_log, ceil_log);
          const double ll = loglik(lq, lr);
          if (ll > best + 1e-12 * std::fabs(best)) {
            best = ll;
            best_q = lq;
            best_r = lr;
            improved = true;
          }
        }
      }
    }
  }
  const double q = std::pow(10.0, best_q), r = std::pow(10.0, best_r);
  return {local_level_smooth(x, q, r), q, r, best};
}

FitKalmanResult fit_kalman_local_level(const TimeSeries& series) {
  const auto x = series.values();
  auto fit = fit_local_level(x);
  return {series.with_values(fit.smoothed), fit.q_var, fit.r_var};
}

}  // namespace smoothbench
