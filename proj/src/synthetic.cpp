#include "smoothbench/synthetic.hpp"

#include <cmath>

#include "smoothbench/normalization.hpp"
#include "smoothbench/random.hpp"

namespace smoothbench {

double synthetic_titer(std::size_t index, std::size_t length) {
  const double t = static_cast<double>(index);
  const double centre = 0.55 * static_cast<double>(length);
  const double scale = static_cast<double>(length) / 12.0;
  const double s = 1.0 / (1.0 + std::exp(-(t - centre) / scale));
  return 2.0e4 + 1.2e6 * s * (1.0 - s);
}

std::vector<SurveillanceRecord> make_synthetic_site(const SyntheticSite& p, std::size_t length,
                                                    std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SurveillanceRecord> out;
  out.reserve(length);
  Date date{std::chrono::year{2020} / 9 / 1};
  const double q_mean = p.flow_m3_per_d * 1000.0;
  for (std::size_t i = 0; i < length; ++i) {
    const double truth = synthetic_titer(i, length);
    const double z_virus = standard_normal(rng);
    const double z_flow = standard_normal(rng);
    const double z_nh4 = standard_normal(rng);
    const double z_inc = standard_normal(rng);

    SurveillanceRecord r;
    r.site = p.site;
    r.date = date;
    const double q = q_mean * (1.0 + 0.05 * z_flow);
    r.q_flow = q;
    r.c_virus = truth * std::exp(p.noise_sigma * z_virus - 0.5 * p.noise_sigma * p.noise_sigma);
    r.c_nh4 = p.constant_nh4 ? p.f_nh4 * p.population / q_mean
                             : p.f_nh4 * p.population / q * (1.0 + 0.03 * z_nh4);
    const double load = truth * q_mean / p.population;
    const double incidence = (p.intercept + p.slope * load) * (1.0 + 0.05 * z_inc);
    r.incidence_7d = incidence;
    r.active_cases = std::round(incidence * p.population / 1.0e5);
    out.push_back(std::move(r));
    date += std::chrono::days{i % 2 == 0 ? 3 : 4};
  }
  return out;
}

std::vector<SurveillanceRecord> bundled_synthetic_site() { return make_synthetic_site(SyntheticSite{}, 60, 42); }

std::vector<SyntheticSite> catchment_sites() {
  const double base_pop = 1.9e6;
  auto site = [&](std::string name, double pop, double flow, double f, double slope, double intercept) {
    SyntheticSite s;
    s.site = std::move(name);
    s.population = pop;
    s.flow_m3_per_d = flow;
    s.f_nh4 = f;
    s.noise_sigma = 0.06 * std::sqrt(base_pop / pop);
    s.slope = slope;
    s.intercept = intercept;
    return s;
  };
  return {
      site("A", 1.9e6, 539500.0, 10.71, 2.5e-6, 2.0),
      site("B", 320700.0, 83190.0, 6.49, 3.5e-6, 5.0),
      site("C", 41700.0, 16340.0, 8.99, 5.0e-6, 10.0),
      site("D", 23600.0, 4900.0, 6.80, 7.0e-6, 15.0),
  };
}

std::vector<SurveillanceRecord> make_catchment_dataset(std::size_t length, std::uint64_t seed) {
  std::vector<SurveillanceRecord> out;
  std::uint64_t k = 0;
  for (const auto& s : catchment_sites()) {
    auto rows = make_synthetic_site(s, length, mix_seed(seed, ++k));
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

}  // namespace smoothbench
