#include "smoothbench/pipeline.hpp"

#include <cstdio>
#include <map>

#include "smoothbench/error.hpp"

namespace smoothbench {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string_view objective_name(Objective o) {
  switch (o) {
    case Objective::Aic: return "aic";
    case Objective::Mae: return "mae";
    case Objective::Combined: return "combined";
  }
  return "?";
}

}  // namespace

std::string_view to_string(SignalKind kind) { return kind == SignalKind::Raw ? "raw" : "normalized"; }
std::string_view file_tag(SignalKind kind) { return kind == SignalKind::Raw ? "raw" : "norm"; }

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string canonical_config(const PipelineConfig& c) {
  char buf[64];
  std::string s;
  auto put = [&](std::string_view key, const std::string& value) {
    s.append(key).append("=").append(value).append(";");
  };
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  put("ga_pop", std::to_string(c.ga.population_size));
  put("ga_iters", std::to_string(c.ga.iterations));
  put("ga_mutation", num(c.ga.mutation_rate));
  put("ga_crossover", num(c.ga.crossover_rate));
  put("ga_elitism", num(c.ga.elitism_fraction));
  put("ga_patience", c.ga.patience ? std::to_string(*c.ga.patience) : "none");
  put("seed", std::to_string(c.master_seed));
  put("objective", std::string(objective_name(c.objective)));
  put("aic_sign", c.aic_sign == AicSign::Paper ? "paper" : "standard");
  put("standardize", c.standardize ? "1" : "0");
  std::string methods;
  for (auto m : c.methods) methods += std::string(method_info(m).code) + ",";
  put("methods", methods);
  put("band_level", num(c.band_level));
  put("f_nh4", c.f_nh4 ? num(*c.f_nh4) : "table");
  std::string table;
  for (const auto& row : c.biomarker_table) table += row.site + ":" + num(row.load.f_bm) + ",";
  put("biomarker_table", table);
  put("regress_raw", c.regress_raw_loads ? "1" : "0");
  return s;
}

double resolve_f_nh4(const std::string& site, const PipelineConfig& config) {
  if (config.f_nh4) return *config.f_nh4;
  if (auto f = find_load(config.biomarker_table, site)) return f->f_bm;
  if (auto f = find_load(reference_nh4_loads(), site)) return f->f_bm;
  throw Error(ErrorKind::MissingBiomarkerLoad,
              "no specific NH4 load known for site '" + site + "' (pass --f-nh4 or --biomarker-table)");
}

TimeSeries prepare_signal(std::span<const SurveillanceRecord> records, SignalKind kind,
                          const PipelineConfig& config) {
  const TimeSeries virus = build_series(records, RecordField::Virus);
  if (kind == SignalKind::Raw) return virus.observed_only();
  bool any_nh4 = false;
  for (const auto& r : records) any_nh4 = any_nh4 || r.c_nh4.has_value();
  if (!any_nh4) throw Error(ErrorKind::MissingBiomarker, "normalized signal requested but no NH4 values present");
  const TimeSeries nh4 = build_series(records, RecordField::Nh4);
  const double f = resolve_f_nh4(records.front().site, config);
  return normalize_series(virus, nh4, f).observed_only();
}

ClusterResult recluster(const BenchmarkReport& report, const PipelineConfig& config) {
  std::vector<PerformanceIndex> indices;
  for (const auto& m : report.methods) {
    if (m.ok) indices.push_back(m.index);
  }
  const auto scores = make_scores(indices, config.standardize);
  return cluster_methods(scores, config.master_seed);
}

BenchmarkReport run_benchmark(std::span<const SurveillanceRecord> records, SignalKind kind,
                              const PipelineConfig& config) {
  const TimeSeries signal = prepare_signal(records, kind, config);
  const std::size_t n = signal.size();
  if (n < 5) {
    throw Error(ErrorKind::SeriesTooShort, "benchmark needs at least 5 observed samples, got " + std::to_string(n));
  }

  BenchmarkReport report;
  report.site = records.front().site;
  report.kind = kind;
  report.provenance.tool_version = std::string(kToolVersion);
  report.provenance.config_hash = hex64(fnv1a(canonical_config(config)));
  report.provenance.master_seed = config.master_seed;

  std::map<MethodId, LoocvMatrix> matrices;
  for (MethodId method : config.methods) {
    MethodOutcome outcome;
    outcome.method = method;
    outcome.index.method = method;
    try {
      if (is_parametric(method)) {
        GaConfig ga = config.ga;
        ga.seed = mix_seed(config.master_seed, static_cast<std::uint64_t>(method));
        const auto cal = calibrate(method, signal, ga, config.objective, config.aic_sign);
        outcome.spec = cal.spec;
        outcome.ga_evaluations = cal.search.evaluations;
        outcome.ga_generations = cal.search.best_per_generation.size() - 1;
        report.provenance.loocv_builds += cal.search.evaluations;
        if (config.objective == Objective::Combined) report.provenance.loocv_builds += 20;
      } else {
        outcome.spec = SmootherSpec::defaults(method);
      }
      auto loocv = build_loocv_matrix(outcome.spec, signal);
      report.provenance.loocv_builds += 1;
      outcome.index = performance_index(method, loocv, config.aic_sign);
      outcome.ok = true;
      matrices.emplace(method, std::move(loocv));
    } catch (const Error& e) {
      outcome.ok = false;
      outcome.error = e.what();
      report.warnings.push_back(method_label(method) + " excluded: " + e.what());
    }
    report.methods.push_back(std::move(outcome));
  }

  std::vector<PerformanceIndex> indices;
  for (const auto& m : report.methods) {
    if (m.ok) indices.push_back(m.index);
  }
  if (indices.size() < 3) {
    throw Error(ErrorKind::TooFewPoints, "only " + std::to_string(indices.size()) +
                                             " method(s) succeeded; clustering needs 3");
  }
  report.scores = make_scores(indices, config.standardize);
  report.clusters = cluster_methods(report.scores, config.master_seed);
  report.optimal = report.clusters.optimal;
  for (const auto& m : report.methods) {
    if (m.method == report.optimal) report.optimal_spec = m.spec;
  }

  const auto values = signal.values();
  report.dates = signal.dates();
  report.original = values;
  report.smoothed = smooth(report.optimal_spec, values);
  const LoocvMatrix& best = matrices.at(report.optimal);
  const auto band = confidence_band(best, config.band_level);
  report.band_lower = band.lower.values();
  report.band_upper = band.upper.values();
  if (config.keep_loocv) report.loocv = best.m;
  report.provenance.smoother_evaluations = report.provenance.loocv_builds * n + 1;

  bool any_incidence = false;
  for (const auto& r : records) any_incidence = any_incidence || r.incidence_7d.has_value();
  if (any_incidence) {
    const TimeSeries incidence = build_series(records, RecordField::Incidence);
    const TimeSeries loads = config.regress_raw_loads ? signal : report.smoothed_series();
    const auto pairs = join_by_date(loads, incidence, report.site);
    try {
      report.regression = fit_linear(pairs);
    } catch (const Error& e) {
      report.warnings.push_back(std::string("regression skipped: ") + e.what());
    }
  }
  return report;
}

std::pair<BenchmarkReport, BenchmarkReport> run_raw_and_normalized(std::span<const SurveillanceRecord> records,
                                                                   const PipelineConfig& config) {
  auto raw = run_benchmark(records, SignalKind::Raw, config);
  auto norm = run_benchmark(records, SignalKind::Normalized, config);
  return {std::move(raw), std::move(norm)};
}

}  // namespace smoothbench
