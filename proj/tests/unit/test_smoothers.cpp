#include <doctest.h>

#include <cmath>
#include <numeric>

#include "smoothbench/error.hpp"
#include "smoothbench/random.hpp"
#include "smoothbench/smoothers.hpp"
#include "support/oracles.hpp"

using namespace smoothbench;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Internal;
}

std::vector<double> noisy_sine(std::size_t n, std::uint64_t seed, double noise = 0.3) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(0.2 * static_cast<double>(i)) + noise * standard_normal(rng);
  return x;
}

double sample_variance(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

SmootherSpec spec(MethodId id, std::vector<double> p) { return {id, std::move(p)}; }

}  // namespace

TEST_CASE("catalog lists thirteen methods with their parameter counts") {
  CHECK(kAllMethods.size() == 13);
  const std::vector<std::pair<MethodId, int>> counts{
      {MethodId::TUK, 0}, {MethodId::KAL, 0}, {MethodId::FFT, 0}, {MethodId::SPL, 1}, {MethodId::KER, 1},
      {MethodId::SMA, 1}, {MethodId::RRM, 1}, {MethodId::SUP, 1}, {MethodId::POL, 1}, {MethodId::SGF, 2},
      {MethodId::ARI, 2}, {MethodId::ADP, 3}, {MethodId::GAM, 4}};
  for (auto [id, k] : counts) {
    CHECK(parameter_count(id) == k);
    CHECK(method_info(id).params.size() == static_cast<std::size_t>(k));
    CHECK(is_parametric(id) == (k > 0));
    CHECK_NOTHROW(validate(SmootherSpec::defaults(id)));
    CHECK(parse_method(method_info(id).code) == id);
    CHECK(parse_method(method_label(id)) == id);
  }
  CHECK_FALSE(parse_method("xyz"));
}

TEST_CASE("parameter validation") {
  CHECK(kind_of([] { validate(spec(MethodId::SMA, {4})); }) == ErrorKind::InvalidParams);
  CHECK(kind_of([] { validate(spec(MethodId::SMA, {23})); }) == ErrorKind::InvalidParams);
  CHECK(kind_of([] { validate(spec(MethodId::SMA, {})); }) == ErrorKind::InvalidParams);
  CHECK(kind_of([] { validate(spec(MethodId::ARI, {2.5, 0})); }) == ErrorKind::InvalidParams);
  CHECK(kind_of([] { validate(spec(MethodId::ADP, {7, 2, 1})); }) == ErrorKind::InvalidParams);
  CHECK_NOTHROW(validate(spec(MethodId::SGF, {5, 4})));
  try {
    validate(spec(MethodId::SGF, {5, 5}));
    FAIL("SGF(5,5) accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidParams);
    CHECK(std::string(e.what()).find("d < w") != std::string::npos);
  }
}

TEST_CASE("repair puts parameters on the feasible set") {
  CHECK(repair_params(MethodId::SMA, {4.2}) == std::vector<double>{5});
  CHECK(repair_params(MethodId::SMA, {100}) == std::vector<double>{21});
  CHECK(repair_params(MethodId::SGF, {5, 6}) == std::vector<double>{5, 4});
  const auto adp = repair_params(MethodId::ADP, {9, 2, 1});
  CHECK(adp[2] >= adp[1]);
  Rng rng(1);
  for (MethodId id : kAllMethods) {
    const auto bounds = method_info(id).params;
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> raw;
      for (const auto& b : bounds) raw.push_back(uniform_real(rng, b.min - 3, b.max + 3));
      CHECK_NOTHROW(validate({id, repair_params(id, raw)}));
    }
  }
}

TEST_CASE("moving average truncates the window at the ends") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  CHECK(smooth(spec(MethodId::SMA, {3}), x) == std::vector<double>{1.5, 2, 3, 4, 4.5});
  Rng rng(2);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> v(7 + uniform_index(rng, 14));
    for (auto& e : v) e = standard_normal(rng);
    for (int w : {3, 5, 7}) {
      const auto got = smooth(spec(MethodId::SMA, {static_cast<double>(w)}), v);
      const auto want = oracle::windowed_mean(v, w);
      for (std::size_t i = 0; i < v.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("Tukey 3R") {
  const std::vector<double> x{1, 5, 2, 8, 3};
  CHECK(tukey_3r(x) == std::vector<double>{1, 2, 3, 3, 3});
  const std::vector<double> mono{1, 2, 2, 4, 9, 10};
  CHECK(tukey_3r(mono) == mono);
  const std::vector<double> flat(8, 3.25);
  CHECK(tukey_3r(flat) == flat);
  CHECK(kind_of([] { tukey_3r(std::vector<double>{1, 2}); }) == ErrorKind::SeriesTooShort);
  CHECK(kind_of([] { smooth_tukey_3r(TimeSeries::from_values(std::vector<double>{1, 2})); }) ==
        ErrorKind::SeriesTooShort);
}

TEST_CASE("repeated running median keeps end values and reaches a fixpoint") {
  const auto x = noisy_sine(40, 3);
  const auto y = repeated_running_median(x, 5);
  CHECK(y.front() == x.front());
  CHECK(y.back() == x.back());
  CHECK(repeated_running_median(y, 5) == y);
}

TEST_CASE("Savitzky-Golay reproduces polynomials and matches a direct fit") {
  std::vector<double> sq(10);
  for (int t = 0; t < 10; ++t) sq[static_cast<std::size_t>(t)] = t * t;
  const auto y = smooth(spec(MethodId::SGF, {5, 2}), sq);
  for (std::size_t t = 0; t < sq.size(); ++t) CHECK(std::abs(y[t] - sq[t]) <= 1e-9);
  CHECK_NOTHROW(smooth(spec(MethodId::SGF, {5, 4}), sq));
  CHECK(kind_of([&] { smooth(spec(MethodId::SGF, {5, 5}), sq); }) == ErrorKind::InvalidParams);

  const auto x = noisy_sine(20, 4);
  for (auto [w, d] : {std::pair{5, 1}, {7, 2}, {9, 4}, {11, 6}}) {
    const auto got = savitzky_golay(x, w, d);
    const auto want = oracle::savgol(x, w, d);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-12);
  }
}

TEST_CASE("adaptive degree filter stays between its degree bounds") {
  const auto x = noisy_sine(50, 5);
  const auto lo = savitzky_golay(x, 7, 0);
  CHECK(adaptive_degree_filter(x, 7, 0, 0) == lo);
  // A cubic is fitted exactly once degree 3 is allowed.
  std::vector<double> cubic(30);
  for (int t = 0; t < 30; ++t) cubic[static_cast<std::size_t>(t)] = 0.01 * t * t * t - 0.3 * t * t + t;
  const auto y = adaptive_degree_filter(cubic, 9, 0, 5);
  for (std::size_t i = 0; i < cubic.size(); ++i) CHECK(y[i] == doctest::Approx(cubic[i]).epsilon(1e-8));
}

TEST_CASE("Kalman local level") {
  const std::vector<double> flat(20, 4.5);
  const auto fit = fit_kalman_local_level(TimeSeries::from_values(flat));
  CHECK(fit.smoothed.values() == flat);
  CHECK(fit.q_var > 0);
  CHECK(fit.r_var > 0);

  Rng rng(42);
  std::vector<double> walk(400);
  double level = 0.0;
  for (auto& v : walk) {
    level += standard_normal(rng);
    v = level + 0.2 * standard_normal(rng);
  }
  const auto rw = fit_local_level(walk);
  CHECK(rw.q_var / rw.r_var > 1.0);

  std::vector<double> white(200);
  for (auto& v : white) v = 10.0 + standard_normal(rng);
  const auto wn = fit_local_level(white);
  CHECK(sample_variance(wn.smoothed) < sample_variance(white));
  CHECK(wn.q_var / wn.r_var < 1.0);

  CHECK(kind_of([] { fit_local_level(std::vector<double>{1, 2, 3, 4}); }) == ErrorKind::SeriesTooShort);
}

TEST_CASE("Kalman variances maximise the likelihood on the search grid") {
  const auto x = noisy_sine(60, 6);
  const auto fit = fit_local_level(x);
  CHECK(fit.log_likelihood == doctest::Approx(local_level_log_likelihood(x, fit.q_var, fit.r_var)));
  for (double fq : {0.5, 2.0}) {
    for (double fr : {0.5, 2.0}) {
      CHECK(local_level_log_likelihood(x, fit.q_var * fq, fit.r_var * fr) <= fit.log_likelihood + 1e-9);
    }
  }
}

TEST_CASE("Fourier low-pass keeps slow components and removes fast ones") {
  std::vector<double> x(64);
  for (int t = 0; t < 64; ++t) {
    x[static_cast<std::size_t>(t)] = 3.0 + std::sin(2 * M_PI * t / 64.0) + 0.1 * std::sin(2 * M_PI * 20 * t / 64.0);
  }
  const auto y = fourier_lowpass(x);
  for (int t = 0; t < 64; ++t) CHECK(y[static_cast<std::size_t>(t)] == doctest::Approx(3.0 + std::sin(2 * M_PI * t / 64.0)).epsilon(1e-9));
  const auto all = fourier_lowpass(x, 1.0);
  for (std::size_t t = 0; t < x.size(); ++t) CHECK(all[t] == doctest::Approx(x[t]).epsilon(1e-9));
}

TEST_CASE("smoothing spline limits") {
  const auto x = noisy_sine(30, 7);
  const auto tight = smoothing_spline(x, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(tight[i] == doctest::Approx(x[i]).epsilon(1e-9));
  // A huge penalty leaves the least-squares line.
  const auto flat = smoothing_spline(x, 1e12);
  const auto line = oracle::ols([] {
    std::vector<double> t(30);
    std::iota(t.begin(), t.end(), 0.0);
    return t;
  }(), x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(flat[i] == doctest::Approx(line.intercept + line.slope * static_cast<double>(i)).epsilon(1e-5));
  }
  std::vector<double> lin(12);
  for (int t = 0; t < 12; ++t) lin[static_cast<std::size_t>(t)] = 2.0 - 0.5 * t;
  const auto y = smoothing_spline(lin, 10.0);
  for (std::size_t i = 0; i < lin.size(); ++i) CHECK(y[i] == doctest::Approx(lin[i]).epsilon(1e-9));
}

TEST_CASE("kernel regression matches a direct Nadaraya-Watson sum") {
  const auto x = noisy_sine(25, 8);
  const double h = 1.7;
  const auto y = kernel_regression(x, h);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double num = 0, den = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double u = (static_cast<double>(i) - static_cast<double>(j)) / h;
      num += std::exp(-0.5 * u * u) * x[j];
      den += std::exp(-0.5 * u * u);
    }
    CHECK(y[i] == doctest::Approx(num / den).epsilon(1e-12));
  }
}

TEST_CASE("loess reproduces quadratics") {
  std::vector<double> q(30);
  for (int t = 0; t < 30; ++t) q[static_cast<std::size_t>(t)] = 0.5 * t * t - 3 * t + 1;
  for (double span : {0.2, 0.5, 1.0}) {
    const auto y = loess_quadratic(q, span);
    for (std::size_t i = 0; i < q.size(); ++i) CHECK(y[i] == doctest::Approx(q[i]).epsilon(1e-9));
  }
}

TEST_CASE("super smoother reproduces lines and reduces noise") {
  std::vector<double> lin(40);
  for (int t = 0; t < 40; ++t) lin[static_cast<std::size_t>(t)] = 1.0 + 0.25 * t;
  for (double bass : {0.0, 5.0, 10.0}) {
    const auto y = super_smoother(lin, bass);
    for (std::size_t i = 0; i < lin.size(); ++i) CHECK(y[i] == doctest::Approx(lin[i]).epsilon(1e-9));
  }
  const auto x = noisy_sine(80, 9);
  const auto y = super_smoother(x, 0.0);
  double rough_x = 0, rough_y = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    rough_x += std::pow(x[i] - x[i - 1], 2);
    rough_y += std::pow(y[i] - y[i - 1], 2);
  }
  CHECK(rough_y < rough_x);
}

TEST_CASE("autoregressive smoother") {
  const auto x = noisy_sine(40, 10);
  for (auto [p, d] : {std::pair{1, 0}, {2, 1}, {5, 1}}) {
    const auto y = ar_smoother(x, p, d);
    CHECK(y.size() == x.size());
    for (double v : y) CHECK(std::isfinite(v));
  }
  // An exact AR(1) recursion is predicted exactly.
  std::vector<double> ar(20);
  ar[0] = 1.0;
  for (std::size_t t = 1; t < ar.size(); ++t) ar[t] = 0.5 + 0.8 * ar[t - 1];
  const auto y = ar_smoother(ar, 1, 0);
  for (std::size_t t = 1; t < ar.size(); ++t) CHECK(y[t] == doctest::Approx(ar[t]).epsilon(1e-9));
  CHECK(kind_of([&] { smooth(spec(MethodId::ARI, {5, 1}), std::span(x).first(12)); }) == ErrorKind::SeriesTooShort);
  CHECK_NOTHROW(smooth(spec(MethodId::ARI, {5, 1}), std::span(x).first(13)));
}

TEST_CASE("GAM fits lines exactly and chooses a finite GCV lambda") {
  std::vector<double> lin(30);
  for (int t = 0; t < 30; ++t) lin[static_cast<std::size_t>(t)] = 4.0 + 0.1 * t;
  const auto fit = gam_smooth(lin, 10, 0.0, false);
  for (std::size_t i = 0; i < lin.size(); ++i) CHECK(fit.fitted[i] == doctest::Approx(lin[i]).epsilon(1e-8));
  const auto x = noisy_sine(60, 11);
  const auto a = gam_smooth(x, 12, 0.0, true);
  CHECK(std::isfinite(a.lambda));
  CHECK(a.edf > 2.0 - 1e-6);
  CHECK(a.edf <= 12.0 + 1e-9);
  // The selected lambda is no worse than its neighbours on the GCV scale.
  for (double shift : {-1.0, 1.0}) {
    const auto b = gam_smooth(x, 12, std::log10(a.lambda) + shift, false);
    CHECK(a.gcv <= b.gcv + 1e-12);
  }
}

TEST_CASE("window and length preconditions") {
  const std::vector<double> four{1, 2, 3, 4};
  for (MethodId id : kAllMethods) {
    CHECK(kind_of([&] { smooth(SmootherSpec::defaults(id), four); }) == ErrorKind::SeriesTooShort);
  }
  const std::vector<double> six{1, 2, 3, 4, 5, 6};
  CHECK(kind_of([&] { smooth(spec(MethodId::SMA, {7}), six); }) == ErrorKind::SeriesTooShort);
  CHECK_NOTHROW(smooth(spec(MethodId::SMA, {5}), six));
}

TEST_CASE("apply_smoother keeps the dates") {
  const auto s = TimeSeries::from_values(noisy_sine(30, 12));
  for (MethodId id : kAllMethods) {
    const auto out = apply_smoother(SmootherSpec::defaults(id), s);
    CHECK(out.dates() == s.dates());
  }
}
