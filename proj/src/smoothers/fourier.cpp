#include <fftw3.h>

#include <complex>
#include <memory>
#include <mutex>

#include "smoothbench/error.hpp"
#include "smoothbench/smoothers.hpp"

namespace smoothbench {

namespace {

// FFTW planning is not thread-safe; execution on distinct arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* plan) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

}  // namespace

std::vector<double> fourier_lowpass(std::span<const double> x, double energy_fraction) {
  if (x.empty()) throw Error(ErrorKind::SeriesTooShort, "empty series");
  if (!(energy_fraction > 0.0 && energy_fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidParams, "energy fraction must lie in (0, 1]");
  }
  const int n = static_cast<int>(x.size());
  const int bins = n / 2 + 1;
  std::vector<double> real(x.begin(), x.end());
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(bins));
  auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());

  Plan forward, backward;
  {
    std::lock_guard lock(planner_mutex());
    forward.reset(fftw_plan_dft_r2c_1d(n, real.data(), cplx, FFTW_ESTIMATE));
    backward.reset(fftw_plan_dft_c2r_1d(n, cplx, real.data(), FFTW_ESTIMATE));
  }
  fftw_execute(forward.get());

  // Half-spectrum energies; bins other than DC and Nyquist stand for two conjugate terms.
  std::vector<double> energy(static_cast<std::size_t>(bins), 0.0);
  double total = 0.0;
  for (int k = 1; k < bins; ++k) {
    const double weight = (2 * k == n) ? 1.0 : 2.0;
    energy[static_cast<std::size_t>(k)] = weight * std::norm(spec[static_cast<std::size_t>(k)]);
    total += energy[static_cast<std::size_t>(k)];
  }
  int cutoff = bins - 1;
  if (total > 0.0) {
    double acc = 0.0;
    for (int k = 1; k < bins; ++k) {
      acc += energy[static_cast<std::size_t>(k)];
      if (acc >= energy_fraction * total) {
        cutoff = k;
        break;
      }
    }
  }
  for (int k = cutoff + 1; k < bins; ++k) spec[static_cast<std::size_t>(k)] = 0.0;
  fftw_execute(backward.get());

  std::vector<double> out(real.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = real[i] / n;
  return out;
}

}  // namespace smoothbench
