#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "smoothbench/calibration.hpp"
#include "smoothbench/clustering.hpp"
#include "smoothbench/epi.hpp"
#include "smoothbench/evaluation.hpp"
#include "smoothbench/normalization.hpp"
#include "smoothbench/smoothers.hpp"
#include "smoothbench/timeseries.hpp"

namespace smoothbench {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class SignalKind { Raw, Normalized };
std::string_view to_string(SignalKind kind);
/// "raw" or "norm" as used in output file names.
std::string_view file_tag(SignalKind kind);

struct PipelineConfig {
  GaConfig ga = GaConfig::desk_scale();  // ga.seed is replaced by a per-method seed
  std::uint64_t master_seed = 42;
  Objective objective = Objective::Aic;
  AicSign aic_sign = AicSign::Paper;
  bool standardize = true;
  std::vector<MethodId> methods{kAllMethods.begin(), kAllMethods.end()};
  double band_level = 0.95;
  std::optional<double> f_nh4;                     // overrides every table
  std::vector<SiteBiomarkerLoad> biomarker_table;  // consulted before the reference loads
  bool keep_loocv = false;
  bool regress_raw_loads = false;  // regression on the unsmoothed signal instead
};

/// Canonical `key=value;` rendering of every setting that affects results.
std::string canonical_config(const PipelineConfig& config);
/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);

struct MethodOutcome {
  MethodId method;
  bool ok = false;
  std::string error;
  SmootherSpec spec;
  PerformanceIndex index;
  std::size_t ga_evaluations = 0;
  std::size_t ga_generations = 0;
  bool operator==(const MethodOutcome&) const = default;
};

struct Provenance {
  std::string tool_version;
  std::string config_hash;  // hex FNV-1a of canonical_config
  std::uint64_t master_seed = 0;
  std::size_t smoother_evaluations = 0;
  std::size_t loocv_builds = 0;
  bool operator==(const Provenance&) const = default;
};

struct BenchmarkReport {
  std::string site;
  SignalKind kind = SignalKind::Raw;
  std::vector<MethodOutcome> methods;
  ClusterResult clusters;
  std::vector<MethodScore> scores;  // clustered (successful) methods, same order as clusters.methods
  MethodId optimal = MethodId::SPL;
  SmootherSpec optimal_spec;
  std::vector<Date> dates;
  std::vector<double> original;
  std::vector<double> smoothed;
  std::vector<double> band_lower;
  std::vector<double> band_upper;
  std::optional<Eigen::MatrixXd> loocv;
  std::optional<LinearFit> regression;
  std::vector<std::string> warnings;
  Provenance provenance;

  TimeSeries smoothed_series() const { return TimeSeries::from_values(dates, smoothed); }
};

/// The signal the benchmark runs on: observed samples of the raw concentrations (copies/L)
/// or of the NH4-normalized load (copies/cap/day).
TimeSeries prepare_signal(std::span<const SurveillanceRecord> records, SignalKind kind,
                          const PipelineConfig& config);

/// Specific NH4 load for a site: explicit value, then the configured table, then the
/// reference loads.
double resolve_f_nh4(const std::string& site, const PipelineConfig& config);

BenchmarkReport run_benchmark(std::span<const SurveillanceRecord> records, SignalKind kind,
                              const PipelineConfig& config);

std::pair<BenchmarkReport, BenchmarkReport> run_raw_and_normalized(std::span<const SurveillanceRecord> records,
                                                                   const PipelineConfig& config);

/// Re-runs clustering from the stored performance indices.
ClusterResult recluster(const BenchmarkReport& report, const PipelineConfig& config);

}  // namespace smoothbench
