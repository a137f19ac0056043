#pragma once

#include <span>
#include <string>
#include <vector>

#include "smoothbench/timeseries.hpp"

namespace smoothbench {

struct LoadIncidencePair {
  double load;       // RNA copies per capita per day
  double incidence;  // weekly cases per 100,000 persons
  std::string site;
};

/// Ordinary least squares of incidence on load.
struct LinearFit {
  double slope;
  double intercept;
  double r_squared;
  std::size_t n;
};

LinearFit fit_linear(std::span<const LoadIncidencePair> pairs);

inline double incidence_at_load(const LinearFit& fit, double load) { return fit.slope * load + fit.intercept; }

/// Exact-date join of a load series with an incidence series; dates missing on either
/// side are skipped.
std::vector<LoadIncidencePair> join_by_date(const TimeSeries& load, const TimeSeries& incidence,
                                            const std::string& site);

struct SiteFit {
  std::string site;
  LinearFit fit;
};

}  // namespace smoothbench
