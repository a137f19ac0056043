#include <algorithm>
#include <cctype>
#include <cmath>

#include "smoothbench/error.hpp"
#include "smoothbench/smoothers.hpp"

namespace smoothbench {

namespace {

using K = ParamKind;

constexpr ParamBound kWindow{"w", 3, 21, K::OddInteger, "odd window length"};
constexpr ParamBound kSgWindow{"w", 5, 21, K::OddInteger, "odd window length"};

constexpr std::array<ParamBound, 1> kSmaParams{kWindow};
constexpr std::array<ParamBound, 1> kRrmParams{kWindow};
constexpr std::array<ParamBound, 1> kSplParams{
    {{"log10_lambda", -4, 4, K::Real, "log10 of the roughness penalty"}}};
constexpr std::array<ParamBound, 1> kKerParams{{{"h", 0.5, 10, K::Real, "Gaussian bandwidth in samples"}}};
constexpr std::array<ParamBound, 1> kSupParams{{{"bass", 0, 10, K::Real, "bass/tension control"}}};
constexpr std::array<ParamBound, 1> kPolParams{{{"span", 0.1, 1, K::Real, "fraction of points per local fit"}}};
constexpr std::array<ParamBound, 2> kSgfParams{
    {kSgWindow, {"d", 1, 6, K::Integer, "polynomial degree (< w)"}}};
constexpr std::array<ParamBound, 2> kAriParams{
    {{"p", 1, 5, K::Integer, "autoregressive order"}, {"d", 0, 1, K::Integer, "differencing order"}}};
constexpr std::array<ParamBound, 3> kAdpParams{{kSgWindow,
                                                {"dmin", 0, 2, K::Integer, "minimum degree"},
                                                {"dmax", 0, 6, K::Integer, "maximum degree (>= dmin)"}}};
constexpr std::array<ParamBound, 4> kGamParams{{{"kb", 4, 40, K::Integer, "basis dimension"},
                                                {"log10_lambda", -4, 4, K::Real, "log10 of the penalty"},
                                                {"link", 0, 0, K::Integer, "family/link (0 = Gaussian identity)"},
                                                {"auto_lambda", 0, 1, K::Integer, "1 = choose lambda by GCV"}}};

constexpr std::array<double, 1> kSmaDefaults{5};
constexpr std::array<double, 1> kSplDefaults{0};
constexpr std::array<double, 1> kKerDefaults{2};
constexpr std::array<double, 1> kSupDefaults{0};
constexpr std::array<double, 1> kPolDefaults{0.3};
constexpr std::array<double, 2> kSgfDefaults{7, 2};
constexpr std::array<double, 2> kAriDefaults{2, 0};
constexpr std::array<double, 3> kAdpDefaults{7, 0, 4};
constexpr std::array<double, 4> kGamDefaults{10, 0, 0, 1};

const std::array<MethodInfo, 13> kCatalog{{
    {MethodId::TUK, "tuk", "Tukey 3R running median", {}, {}},
    {MethodId::KAL, "kal", "Kalman local-level smoother", {}, {}},
    {MethodId::FFT, "fft", "Fourier low-pass", {}, {}},
    {MethodId::SPL, "spl", "cubic smoothing spline", kSplParams, kSplDefaults},
    {MethodId::KER, "ker", "Gaussian kernel regression", kKerParams, kKerDefaults},
    {MethodId::SMA, "sma", "centered simple moving average", kSmaParams, kSmaDefaults},
    {MethodId::RRM, "rrm", "repeated running median", kRrmParams, kSmaDefaults},
    {MethodId::SUP, "sup", "Friedman super smoother", kSupParams, kSupDefaults},
    {MethodId::POL, "pol", "local quadratic regression", kPolParams, kPolDefaults},
    {MethodId::SGF, "sgf", "Savitzky-Golay filter", kSgfParams, kSgfDefaults},
    {MethodId::ARI, "ari", "autoregressive smoother", kAriParams, kAriDefaults},
    {MethodId::ADP, "adp", "adaptive-degree polynomial filter", kAdpParams, kAdpDefaults},
    {MethodId::GAM, "gam", "additive model, cubic regression spline", kGamParams, kGamDefaults},
}};

double nearest_odd(double v, double lo, double hi) {
  double n = std::round(v);
  if (std::fmod(std::fabs(n), 2.0) == 0.0) n += (v >= n) ? 1.0 : -1.0;
  const double olo = std::fmod(std::fabs(lo), 2.0) == 1.0 ? lo : lo + 1.0;
  const double ohi = std::fmod(std::fabs(hi), 2.0) == 1.0 ? hi : hi - 1.0;
  return std::clamp(n, olo, ohi);
}

bool is_integral(double v) { return std::floor(v) == v; }

int as_int(double v) { return static_cast<int>(std::lround(v)); }

void require_length(std::size_t n, std::size_t needed, MethodId id) {
  if (n < needed) {
    throw Error(ErrorKind::SeriesTooShort, method_label(id) + " needs at least " + std::to_string(needed) +
                                               " samples, got " + std::to_string(n));
  }
}

}  // namespace

const MethodInfo& method_info(MethodId id) { return kCatalog[static_cast<std::size_t>(id)]; }

std::optional<MethodId> parse_method(std::string_view code) {
  std::string lower(code);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const auto& info : kCatalog) {
    if (info.code == lower) return info.id;
  }
  return std::nullopt;
}

std::string method_label(MethodId id) {
  std::string s(method_info(id).code);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

int parameter_count(MethodId id) { return static_cast<int>(method_info(id).params.size()); }

bool is_parametric(MethodId id) { return parameter_count(id) > 0; }

SmootherSpec SmootherSpec::defaults(MethodId id) {
  const auto& d = method_info(id).defaults;
  return {id, std::vector<double>(d.begin(), d.end())};
}

void validate(const SmootherSpec& spec) {
  const auto bounds = spec.bounds();
  const std::string label = method_label(spec.method);
  if (spec.params.size() != bounds.size()) {
    throw Error(ErrorKind::InvalidParams, label + " takes " + std::to_string(bounds.size()) +
                                              " parameter(s), got " + std::to_string(spec.params.size()));
  }
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const auto& b = bounds[i];
    const double v = spec.params[i];
    const std::string name = label + " " + std::string(b.name);
    if (!std::isfinite(v) || v < b.min || v > b.max) {
      throw Error(ErrorKind::InvalidParams, name + "=" + std::to_string(v) + " outside [" +
                                                std::to_string(b.min) + ", " + std::to_string(b.max) + "]");
    }
    if (b.integral() && !is_integral(v)) throw Error(ErrorKind::InvalidParams, name + " must be an integer");
    if (b.kind == ParamKind::OddInteger && as_int(v) % 2 == 0) {
      throw Error(ErrorKind::InvalidParams, name + " must be odd");
    }
  }
  if (spec.method == MethodId::SGF && spec.params[1] >= spec.params[0]) {
    throw Error(ErrorKind::InvalidParams, "SGF requires d < w (polynomial degree below window length)");
  }
  if (spec.method == MethodId::ADP && spec.params[2] < spec.params[1]) {
    throw Error(ErrorKind::InvalidParams, "ADP requires dmax >= dmin");
  }
}

std::vector<double> repair_params(MethodId id, std::vector<double> params) {
  const auto bounds = method_info(id).params;
  params.resize(bounds.size());
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const auto& b = bounds[i];
    double v = std::isfinite(params[i]) ? params[i] : b.min;
    v = std::clamp(v, b.min, b.max);
    if (b.kind == ParamKind::Integer) v = std::clamp(std::round(v), b.min, b.max);
    if (b.kind == ParamKind::OddInteger) v = nearest_odd(v, b.min, b.max);
    params[i] = v;
  }
  if (id == MethodId::SGF && params[1] >= params[0]) params[1] = params[0] - 1;
  if (id == MethodId::ADP && params[2] < params[1]) params[2] = params[1];
  return params;
}

std::vector<double> smooth(const SmootherSpec& spec, std::span<const double> x) {
  validate(spec);
  const std::size_t n = x.size();
  require_length(n, 5, spec.method);
  const auto& p = spec.params;
  switch (spec.method) {
    case MethodId::TUK: return tukey_3r(x);
    case MethodId::KAL: return fit_local_level(x).smoothed;
    case MethodId::FFT: return fourier_lowpass(x);
    case MethodId::SPL: return smoothing_spline(x, std::pow(10.0, p[0]));
    case MethodId::KER: return kernel_regression(x, p[0]);
    case MethodId::SMA:
      require_length(n, static_cast<std::size_t>(as_int(p[0])), spec.method);
      return moving_average(x, as_int(p[0]));
    case MethodId::RRM:
      require_length(n, static_cast<std::size_t>(as_int(p[0])), spec.method);
      return repeated_running_median(x, as_int(p[0]));
    case MethodId::SUP: return super_smoother(x, p[0]);
    case MethodId::POL: return loess_quadratic(x, p[0]);
    case MethodId::SGF:
      require_length(n, static_cast<std::size_t>(as_int(p[0])), spec.method);
      return savitzky_golay(x, as_int(p[0]), as_int(p[1]));
    case MethodId::ARI:
      require_length(n, static_cast<std::size_t>(2 * as_int(p[0]) + as_int(p[1]) + 2), spec.method);
      return ar_smoother(x, as_int(p[0]), as_int(p[1]));
    case MethodId::ADP:
      require_length(n, static_cast<std::size_t>(as_int(p[0])), spec.method);
      return adaptive_degree_filter(x, as_int(p[0]), as_int(p[1]), as_int(p[2]));
    case MethodId::GAM: return gam_smooth(x, as_int(p[0]), p[1], as_int(p[3]) == 1).fitted;
  }
  throw Error(ErrorKind::Internal, "unknown method");
}

TimeSeries apply_smoother(const SmootherSpec& spec, const TimeSeries& series) {
  const auto x = series.values();
  return series.with_values(smooth(spec, x));
}

}  // namespace smoothbench
