#include "smoothbench/epi.hpp"

#include <algorithm>
#include <map>

#include "smoothbench/error.hpp"

namespace smoothbench {

LinearFit fit_linear(std::span<const LoadIncidencePair> pairs) {
  const std::size_t n = pairs.size();
  if (n < 2) throw Error(ErrorKind::InsufficientData, "linear fit needs at least two pairs");
  // Sort a copy so summation order, and therefore the result, ignores input order.
  std::vector<std::pair<double, double>> xy;
  xy.reserve(n);
  for (const auto& p : pairs) xy.emplace_back(p.load, p.incidence);
  std::sort(xy.begin(), xy.end());

  double mx = 0.0, my = 0.0;
  for (auto [x, y] : xy) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (auto [x, y] : xy) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::DegenerateDesign, "all loads are identical");
  LinearFit fit{};
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (auto [x, y] : xy) {
    const double r = y - (fit.intercept + fit.slope * x);
    sse += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  return fit;
}

std::vector<LoadIncidencePair> join_by_date(const TimeSeries& load, const TimeSeries& incidence,
                                            const std::string& site) {
  std::map<Date, double> inc;
  for (const auto& s : incidence.samples()) {
    if (s.value) inc.emplace(s.date, *s.value);
  }
  std::vector<LoadIncidencePair> out;
  for (const auto& s : load.samples()) {
    if (!s.value) continue;
    auto it = inc.find(s.date);
    if (it != inc.end()) out.push_back({*s.value, it->second, site});
  }
  return out;
}

}  // namespace smoothbench
