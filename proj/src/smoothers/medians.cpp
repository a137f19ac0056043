#include <algorithm>

#include "smoothbench/error.hpp"
#include "smoothbench/smoothers.hpp"

namespace smoothbench {

namespace {

double median_of(std::vector<double>& buf) {
  const std::size_t m = buf.size() / 2;
  std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(m), buf.end());
  return buf[m];
}

// One pass of running medians; the half-width shrinks to min(half, i, n-1-i) so every
// window is odd and centered.
std::vector<double> running_median_pass(std::span<const double> x, int half) {
  const auto n = static_cast<int>(x.size());
  std::vector<double> out(x.size());
  std::vector<double> buf;
  for (int i = 0; i < n; ++i) {
    const int h = std::min({half, i, n - 1 - i});
    buf.assign(x.begin() + (i - h), x.begin() + (i + h + 1));
    out[static_cast<std::size_t>(i)] = median_of(buf);
  }
  return out;
}

}  // namespace

std::vector<double> repeated_running_median(std::span<const double> x, int window, int max_passes) {
  if (window < 1 || window % 2 == 0) throw Error(ErrorKind::InvalidParams, "median window must be odd");
  std::vector<double> cur(x.begin(), x.end());
  for (int pass = 0; pass < max_passes; ++pass) {
    auto next = running_median_pass(cur, window / 2);
    if (next == cur) break;
    cur = std::move(next);
  }
  return cur;
}

std::vector<double> tukey_3r(std::span<const double> x) {
  if (x.size() < 3) throw Error(ErrorKind::SeriesTooShort, "Tukey 3R needs at least 3 samples");
  // Running medians of three converge in at most n passes.
  return repeated_running_median(x, 3, static_cast<int>(x.size()) + 1);
}

TimeSeries smooth_tukey_3r(const TimeSeries& series) {
  const auto x = series.values();
  return series.with_values(tukey_3r(x));
}

}  // namespace smoothbench
