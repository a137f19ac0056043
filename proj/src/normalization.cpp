#include "smoothbench/normalization.hpp"

#include <array>

#include "smoothbench/error.hpp"

namespace smoothbench {

double flow_population_load(double c_virus, double q_flow, double population) {
  if (!(population > 0.0)) throw Error(ErrorKind::NonPositivePopulation, "population must be positive");
  return c_virus * q_flow / population;
}

double estimate_population(double c_bm, double q_flow, double f_bm) {
  if (!(f_bm > 0.0)) {
    throw Error(ErrorKind::NonPositiveBiomarkerLoad, "specific biomarker load must be positive");
  }
  return c_bm * q_flow / f_bm;
}

TimeSeries normalize_series(const TimeSeries& c_virus, const TimeSeries& c_nh4, double f_nh4) {
  if (!(f_nh4 > 0.0)) {
    throw Error(ErrorKind::NonPositiveBiomarkerLoad, "specific NH4 load must be positive");
  }
  if (c_virus.size() != c_nh4.size()) {
    throw Error(ErrorKind::MisalignedSeries, "virus and NH4 series differ in length");
  }
  std::vector<Sample> out(c_virus.size());
  for (std::size_t i = 0; i < c_virus.size(); ++i) {
    const Sample& v = c_virus[i];
    const Sample& n = c_nh4[i];
    if (v.date != n.date) {
      throw Error(ErrorKind::MisalignedSeries, "dates differ at " + format_date(v.date));
    }
    out[i].date = v.date;
    if (v.missing() || n.missing()) continue;
    if (!(*n.value > 0.0)) {
      throw Error(ErrorKind::ZeroBiomarkerConcentration,
                  "NH4 concentration is zero at " + format_date(v.date));
    }
    out[i].value = *v.value * f_nh4 / *n.value;
  }
  return TimeSeries(std::move(out));
}

BiomarkerLoad derive_biomarker_load(std::span<const double> daily_loads) {
  if (daily_loads.empty()) throw Error(ErrorKind::EmptyInput, "no daily biomarker loads");
  BiomarkerLoad b{};
  b.p_low = percentile(daily_loads, 0.025);
  b.p_med = percentile(daily_loads, 0.5);
  b.p_high = percentile(daily_loads, 0.975);
  b.f_bm = b.p_med;
  return b;
}

std::span<const SiteBiomarkerLoad> reference_nh4_loads() {
  static const std::array<SiteBiomarkerLoad, 4> table{{
      {"A", {10.71, 9.77, 10.71, 12.17}},
      {"B", {6.49, 5.84, 6.49, 7.13}},
      {"C", {8.99, 8.02, 8.99, 9.73}},
      {"D", {6.80, 5.94, 6.80, 9.32}},
  }};
  return table;
}

std::optional<BiomarkerLoad> find_load(std::span<const SiteBiomarkerLoad> table, const std::string& site) {
  for (const auto& row : table) {
    if (row.site == site) return row.load;
  }
  return std::nullopt;
}

}  // namespace smoothbench
