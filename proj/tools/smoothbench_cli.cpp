#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "smoothbench/error.hpp"
#include "smoothbench/io.hpp"
#include "smoothbench/pipeline.hpp"

using namespace smoothbench;

namespace {

struct Options {
  std::string input;
  std::string out;
  std::string site;
  std::string signal;  // empty: per-command default
  std::uint64_t seed = 42;
  std::string method;
  std::vector<std::string> params;
  std::optional<std::uint64_t> ga_seed;
  std::optional<std::size_t> ga_pop;
  std::optional<std::size_t> ga_iters;
  std::optional<std::size_t> patience;
  std::string objective = "aic";
  std::string aic_sign = "paper";
  bool paper_fidelity = false;
  bool no_standardize = false;
  bool keep_loocv = false;
  bool raw_loads = false;
  std::vector<std::string> methods;
  std::optional<double> f_nh4;
  std::string biomarker_table;
  double band_level = 0.95;
  unsigned threads = 1;
  UnitConfig units;
};

std::string catalog_text() {
  std::ostringstream o;
  o << "Methods (code: parameters with bounds):\n";
  for (MethodId id : kAllMethods) {
    const auto& info = method_info(id);
    o << "  " << info.code << "  " << info.name;
    if (info.params.empty()) o << "  (no parameters)";
    o << "\n";
    for (const auto& b : info.params) {
      o << "       " << b.name << " in [" << b.min << ", " << b.max << "]";
      if (b.kind == ParamKind::Integer) o << " integer";
      if (b.kind == ParamKind::OddInteger) o << " odd integer";
      o << "  " << b.description << "\n";
    }
  }
  return o.str();
}

MethodId require_method(const std::string& code) {
  if (code.empty()) throw Error(ErrorKind::InvalidParams, "--method is required");
  auto m = parse_method(code);
  if (!m) throw Error(ErrorKind::InvalidParams, "unknown method '" + code + "'");
  return *m;
}

SmootherSpec spec_from_flags(MethodId id, const std::vector<std::string>& flags) {
  SmootherSpec spec = SmootherSpec::defaults(id);
  const auto bounds = spec.bounds();
  for (const auto& f : flags) {
    const auto eq = f.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::InvalidParams, "--param expects name=value, got '" + f + "'");
    const std::string name = f.substr(0, eq);
    const std::string text = f.substr(eq + 1);
    std::size_t slot = bounds.size();
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      if (bounds[i].name == name) slot = i;
    }
    if (slot == bounds.size()) {
      throw Error(ErrorKind::InvalidParams, method_label(id) + " has no parameter '" + name + "'");
    }
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size() || text.empty()) {
      throw Error(ErrorKind::InvalidParams, "parameter " + name + " is not a number: '" + text + "'");
    }
    spec.params[slot] = value;
  }
  validate(spec);
  return spec;
}

std::vector<SurveillanceRecord> load_records(const Options& o) {
  if (o.input.empty()) throw Error(ErrorKind::IoError, "--input is required");
  auto records = read_surveillance_csv(std::filesystem::path(o.input), o.units);
  if (!o.site.empty()) return filter_site(records, o.site);
  return records;
}

std::vector<SurveillanceRecord> single_site(const Options& o) {
  auto records = load_records(o);
  const auto sites = sites_of(records);
  if (sites.size() > 1) {
    throw Error(ErrorKind::MixedSites, "input holds " + std::to_string(sites.size()) +
                                           " sites; choose one with --site");
  }
  return records;
}

bool is_surveillance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::string header;
  std::getline(in, header);
  return header.find("virus_copies_per_ml") != std::string::npos;
}

SignalKind signal_kind(const std::string& s) {
  if (s == "raw") return SignalKind::Raw;
  if (s == "normalized") return SignalKind::Normalized;
  throw Error(ErrorKind::InvalidParams, "--signal must be raw, normalized or both");
}

PipelineConfig pipeline_config(const Options& o) {
  PipelineConfig c;
  c.ga = o.paper_fidelity ? GaConfig::paper_fidelity() : GaConfig::desk_scale();
  if (o.ga_pop) c.ga.population_size = *o.ga_pop;
  if (o.ga_iters) c.ga.iterations = *o.ga_iters;
  c.ga.patience = o.patience;
  c.ga.threads = o.threads;
  c.master_seed = o.ga_seed.value_or(o.seed);
  if (o.objective == "aic") c.objective = Objective::Aic;
  else if (o.objective == "mae") c.objective = Objective::Mae;
  else if (o.objective == "combined") c.objective = Objective::Combined;
  else throw Error(ErrorKind::InvalidParams, "--objective must be aic, mae or combined");
  c.aic_sign = o.aic_sign == "standard" ? AicSign::Standard : AicSign::Paper;
  c.standardize = !o.no_standardize;
  if (!o.methods.empty()) {
    c.methods.clear();
    for (const auto& m : o.methods) c.methods.push_back(require_method(m));
  }
  c.band_level = o.band_level;
  c.f_nh4 = o.f_nh4;
  if (!o.biomarker_table.empty()) c.biomarker_table = read_biomarker_table(std::filesystem::path(o.biomarker_table));
  c.keep_loocv = o.keep_loocv;
  c.regress_raw_loads = o.raw_loads;
  c.ga.validate();
  return c;
}

// Writes to --out when given, otherwise stdout.
template <typename Fn>
void emit(const Options& o, Fn&& writer) {
  if (o.out.empty()) {
    writer(std::cout);
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "cannot write " + o.out);
  writer(f);
}

TimeSeries series_input(const Options& o) {
  if (o.input.empty()) throw Error(ErrorKind::IoError, "--input is required");
  if (is_surveillance_file(o.input)) {
    const auto records = single_site(o);
    return prepare_signal(records, signal_kind(o.signal.empty() ? "raw" : o.signal), pipeline_config(o));
  }
  std::ifstream in(o.input);
  return read_series_csv(in).observed_only();
}

int cmd_ingest(const Options& o) {
  const auto records = load_records(o);
  emit(o, [&](std::ostream& out) { write_surveillance_csv(out, records, o.units); });
  return 0;
}

int cmd_normalize(const Options& o) {
  const auto records = load_records(o);
  const auto config = pipeline_config(o);
  std::vector<std::pair<std::string, TimeSeries>> per_site;
  for (const auto& site : sites_of(records)) {
    const auto rows = filter_site(records, site);
    const auto virus = build_series(rows, RecordField::Virus);
    const auto nh4 = build_series(rows, RecordField::Nh4);
    per_site.emplace_back(site, normalize_series(virus, nh4, resolve_f_nh4(site, config)));
  }
  emit(o, [&](std::ostream& out) {
    out << "date,site,load_copies_per_cap_d\n";
    for (const auto& [site, s] : per_site) {
      for (const auto& x : s.samples()) {
        out << format_date(x.date) << ',' << site << ',' << (x.value ? format_number(*x.value) : "") << '\n';
      }
    }
  });
  return 0;
}

int cmd_smooth(const Options& o) {
  const auto spec = spec_from_flags(require_method(o.method), o.params);
  const auto series = series_input(o);
  const auto out_series = apply_smoother(spec, series);
  emit(o, [&](std::ostream& out) { write_series_csv(out, out_series, "smoothed"); });
  return 0;
}

int cmd_calibrate(const Options& o) {
  const auto id = require_method(o.method);
  const auto series = series_input(o);
  const auto config = pipeline_config(o);
  GaConfig ga = config.ga;
  ga.seed = o.ga_seed.value_or(mix_seed(o.seed, static_cast<std::uint64_t>(id)));
  const auto r = calibrate(id, series, ga, config.objective, config.aic_sign);
  nlohmann::ordered_json j;
  j["method"] = method_label(id);
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < r.spec.params.size(); ++i) params[std::string(r.spec.bounds()[i].name)] = r.spec.params[i];
  j["params"] = params;
  j["fitness"] = std::isfinite(r.fitness) ? nlohmann::ordered_json(r.fitness) : nlohmann::ordered_json(nullptr);
  j["mae"] = r.index.mae;
  j["var"] = r.index.var;
  j["aic"] = std::isfinite(r.index.aic) ? nlohmann::ordered_json(r.index.aic) : nlohmann::ordered_json(nullptr);
  j["k"] = r.index.k;
  j["ga_seed"] = ga.seed;
  j["ga_evaluations"] = r.search.evaluations;
  j["best_per_generation"] = r.search.best_per_generation;
  emit(o, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  return 0;
}

int cmd_benchmark(const Options& o) {
  if (o.out.empty()) throw Error(ErrorKind::IoError, "--out directory is required");
  const auto records = single_site(o);
  const auto config = pipeline_config(o);
  std::vector<BenchmarkReport> reports;
  if (o.signal == "both") {
    auto [raw, norm] = run_raw_and_normalized(records, config);
    reports.push_back(std::move(raw));
    reports.push_back(std::move(norm));
  } else {
    reports.push_back(run_benchmark(records, signal_kind(o.signal.empty() ? "raw" : o.signal), config));
  }
  write_report(reports, o.out);
  for (const auto& r : reports) {
    std::cerr << r.site << " " << to_string(r.kind) << ": optimal " << method_label(r.optimal) << "\n";
    for (const auto& w : r.warnings) std::cerr << "  warning: " << w << "\n";
  }
  return 0;
}

int cmd_regress(const Options& o) {
  const auto records = load_records(o);
  const auto config = pipeline_config(o);
  std::optional<SmootherSpec> spec;
  if (!o.raw_loads) {
    spec = o.method.empty() ? SmootherSpec::defaults(MethodId::GAM) : spec_from_flags(require_method(o.method), o.params);
  }
  // Incidence is compared with per-capita loads unless the raw titer is asked for.
  const auto kind = signal_kind(o.signal.empty() || o.signal == "both" ? "normalized" : o.signal);
  std::vector<BenchmarkReport> fits;
  for (const auto& site : sites_of(records)) {
    const auto rows = filter_site(records, site);
    const auto signal = prepare_signal(rows, kind, config);
    const auto loads = spec ? apply_smoother(*spec, signal) : signal;
    BenchmarkReport r;
    r.site = site;
    r.kind = kind;
    r.regression = fit_linear(join_by_date(loads, build_series(rows, RecordField::Incidence), site));
    fits.push_back(std::move(r));
  }
  emit(o, [&](std::ostream& out) { write_regression_csv(out, fits); });
  return 0;
}

int cmd_report(const Options& o) {
  if (o.input.empty()) throw Error(ErrorKind::IoError, "--input report.json is required");
  if (o.out.empty()) throw Error(ErrorKind::IoError, "--out directory is required");
  std::ifstream in(o.input, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + o.input);
  std::ostringstream text;
  text << in.rdbuf();
  const auto reports = parse_report_json(text.str());
  write_report(reports, o.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smoothbench: smoothing benchmark for wastewater surveillance time series"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML/INI file (keys are flag names)");
  app.footer(catalog_text());
  app.set_version_flag("--version", std::string(kToolVersion));

  Options o;
  auto* io = app.add_option_group("Input/output");
  io->add_option("--input", o.input, "Input CSV (surveillance schema or date,value) or report.json");
  io->add_option("--out", o.out, "Output file or directory");
  io->add_option("--site", o.site, "Restrict to one site");
  io->add_option("--signal", o.signal, "raw, normalized or both (benchmark and smooth default to raw, regress to normalized)")->check(CLI::IsMember({"raw", "normalized", "both"}));
  io->add_option("--virus-factor", o.units.virus_to_copies_per_l, "Multiplier from the virus column to copies/L");
  io->add_option("--flow-factor", o.units.flow_to_l_per_d, "Multiplier from the flow column to L/d");
  io->add_option("--nh4-factor", o.units.nh4_to_g_per_l, "Multiplier from the NH4 column to g/L");

  auto* sm = app.add_option_group("Smoother");
  sm->add_option("--method", o.method, "Method code (see list below)");
  sm->add_option("--param", o.params, "Parameter as name=value, repeatable");

  auto* ga = app.add_option_group("Calibration");
  ga->add_option("--seed", o.seed, "Master seed")->envname("SMOOTHBENCH_SEED");
  ga->add_option("--ga-seed", o.ga_seed, "Seed for the genetic search (overrides the master seed)");
  ga->add_option("--ga-pop", o.ga_pop, "Population size");
  ga->add_option("--ga-iters", o.ga_iters, "Generations");
  ga->add_option("--patience", o.patience, "Stop after this many generations without improvement");
  ga->add_option("--objective", o.objective, "aic, mae or combined")->check(CLI::IsMember({"aic", "mae", "combined"}));
  ga->add_flag("--paper-fidelity", o.paper_fidelity, "Population 100 and 1000 generations instead of 30 and 100");
  ga->add_option("--threads", o.threads, "Concurrent fitness evaluations");

  auto* bm = app.add_option_group("Benchmark");
  bm->add_option("--methods", o.methods, "Comma-separated subset of method codes")->delimiter(',');
  bm->add_flag("--no-standardize", o.no_standardize, "Cluster on raw features instead of z-scores");
  bm->add_option("--aic-sign", o.aic_sign, "paper (T ln(SSE/T) - 2k) or standard (+2k)")
      ->check(CLI::IsMember({"paper", "standard"}));
  bm->add_option("--band-level", o.band_level, "Confidence band level")->check(CLI::Range(0.0, 1.0));
  bm->add_flag("--keep-loocv", o.keep_loocv, "Store the optimal method's cross-validation matrix");
  bm->add_flag("--raw-loads", o.raw_loads, "Regress incidence on unsmoothed loads");
  bm->add_option("--f-nh4", o.f_nh4, "Specific NH4 load in g/cap/d for every site");
  bm->add_option("--biomarker-table", o.biomarker_table, "CSV site,f_bm_g_per_cap_d,p025,p975");

  int (*action)(const Options&) = nullptr;
  auto sub = [&](const char* name, const char* help, int (*fn)(const Options&)) {
    app.add_subcommand(name, help)->callback([&action, fn] { action = fn; });
  };
  sub("ingest", "Validate a surveillance CSV and echo it in canonical form", cmd_ingest);
  sub("normalize", "Emit NH4-normalized loads (copies/cap/day)", cmd_normalize);
  sub("smooth", "Apply one method with explicit parameters", cmd_smooth);
  sub("calibrate", "Calibrate one method with the genetic search", cmd_calibrate);
  sub("benchmark", "Full benchmark: calibrate, cross-validate, cluster, report", cmd_benchmark);
  sub("regress", "Per-site linear fits of incidence on load", cmd_regress);
  sub("report", "Re-render a stored report.json", cmd_report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    return action ? action(o) : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_input_error(e.kind()) ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
