#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smoothbench/timeseries.hpp"

namespace smoothbench {

/// Specific biomarker load (g/person/day) with its lockdown-period percentiles.
struct BiomarkerLoad {
  double f_bm;
  double p_low;   // 2.5 %
  double p_med;   // 50 %
  double p_high;  // 97.5 %
};

/// Row of the biomarker load table `site,f_bm_g_per_cap_d,p025,p975`.
struct SiteBiomarkerLoad {
  std::string site;
  BiomarkerLoad load;
};

/// Per-capita load from concentration and flow: c * Q / P.
double flow_population_load(double c_virus, double q_flow, double population);

/// Contributing population from a biomarker: c_bm * Q / f_bm.
double estimate_population(double c_bm, double q_flow, double f_bm);

/// Pointwise c_virus * f_nh4 / c_nh4 on identical dates; missing in either input stays missing.
TimeSeries normalize_series(const TimeSeries& c_virus, const TimeSeries& c_nh4, double f_nh4);

/// Percentiles 2.5/50/97.5 of daily per-capita biomarker loads; f_bm is the median.
BiomarkerLoad derive_biomarker_load(std::span<const double> daily_loads);

/// NH4-N loads for the four Austrian catchments A-D measured during the spring 2020 lockdown.
std::span<const SiteBiomarkerLoad> reference_nh4_loads();

std::optional<BiomarkerLoad> find_load(std::span<const SiteBiomarkerLoad> table, const std::string& site);

}  // namespace smoothbench
