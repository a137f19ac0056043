#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "smoothbench/normalization.hpp"
#include "smoothbench/pipeline.hpp"
#include "smoothbench/timeseries.hpp"

namespace smoothbench {

/// Multipliers from the file's units to the internal copies/L, L/d and g/L.
struct UnitConfig {
  double virus_to_copies_per_l = 1000.0;  // copies/ml
  double flow_to_l_per_d = 1000.0;        // m3/d
  double nh4_to_g_per_l = 0.001;          // mg/L
};

/// `date,site,virus_copies_per_ml,flow_m3_per_d,nh4_mg_per_l[,active_cases,incidence_7d_per_100k]`,
/// ISO dates, empty cells are missing values.
std::vector<SurveillanceRecord> read_surveillance_csv(std::istream& in, const UnitConfig& units = {});
std::vector<SurveillanceRecord> read_surveillance_csv(const std::filesystem::path& path,
                                                      const UnitConfig& units = {});
/// Same schema, in the given file units (the inverse of reading).
void write_surveillance_csv(std::ostream& out, std::span<const SurveillanceRecord> records,
                            const UnitConfig& units = {});

/// Records of one site; throws SchemaError when the site is absent.
std::vector<SurveillanceRecord> filter_site(std::span<const SurveillanceRecord> records, const std::string& site);
std::vector<std::string> sites_of(std::span<const SurveillanceRecord> records);

/// Generic `date,value` series.
TimeSeries read_series_csv(std::istream& in);
void write_series_csv(std::ostream& out, const TimeSeries& series, std::string_view value_name = "value");

std::vector<SiteBiomarkerLoad> read_biomarker_table(std::istream& in);
std::vector<SiteBiomarkerLoad> read_biomarker_table(const std::filesystem::path& path);
/// `site,f_bm_g_per_cap_d,p025,p975`
void write_biomarker_table(std::ostream& out, std::span<const SiteBiomarkerLoad> table);

/// Seventeen significant digits, enough to read back the identical double.
std::string format_number(double v);

void write_smoothed_csv(std::ostream& out, const BenchmarkReport& report);
void write_clusters_csv(std::ostream& out, const BenchmarkReport& report);
void write_regression_csv(std::ostream& out, std::span<const BenchmarkReport> reports);

std::string report_json(std::span<const BenchmarkReport> reports);
std::vector<BenchmarkReport> parse_report_json(const std::string& text);

/// Writes report.json, smoothed_<kind>.csv, clusters_<kind>.csv, clusters.csv (first report)
/// and regression.csv into `dir`; returns the written paths.
std::vector<std::filesystem::path> write_report(std::span<const BenchmarkReport> reports,
                                                const std::filesystem::path& dir);

}  // namespace smoothbench
