#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smoothbench/timeseries.hpp"

namespace smoothbench {

/// Parameters of a generated treatment-plant record set.
struct SyntheticSite {
  std::string site = "A";
  double population = 1.9e6;
  double flow_m3_per_d = 539500.0;
  double f_nh4 = 10.71;        // g/cap/d
  double noise_sigma = 0.06;   // log-scale noise on the virus titer
  double slope = 2.5e-6;       // incidence per 100k per copies/cap/d
  double intercept = 2.0;
  bool constant_nh4 = false;   // NH4 fixed at its mean, flow noise then only moves Q
};

/// Twice-weekly samples from 2020-09-01 (alternating 3 and 4 day gaps). The virus titer is a
/// logistic pulse times log-normal noise; NH4 follows f_nh4 * P / Q; incidence is linear in the
/// noise-free per-capita load.
std::vector<SurveillanceRecord> make_synthetic_site(const SyntheticSite& params, std::size_t length,
                                                    std::uint64_t seed);

/// The bundled single-site data set: site A, 60 samples, seed 42.
std::vector<SurveillanceRecord> bundled_synthetic_site();

/// Four sites A-D sized like the paper's catchments; noise grows as 1/sqrt(P) and smaller sites
/// get a steeper, higher incidence line.
std::vector<SyntheticSite> catchment_sites();
std::vector<SurveillanceRecord> make_catchment_dataset(std::size_t length, std::uint64_t seed);

/// Noise-free titer curve used by the generators (copies/L), indexed by sample number.
double synthetic_titer(std::size_t index, std::size_t length);

}  // namespace smoothbench
