#include "smoothbench/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "smoothbench/error.hpp"

namespace smoothbench {

namespace {

using json = nlohmann::ordered_json;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string at_line(std::size_t line) { return " (line " + std::to_string(line) + ")"; }

std::optional<double> parse_cell(const std::string& cell, std::size_t line, std::string_view column) {
  if (cell.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    throw Error(ErrorKind::ParseError, "bad number '" + cell + "' in column " + std::string(column) + at_line(line));
  }
  return v;
}

Date parse_date_cell(const std::string& cell, std::size_t line) {
  auto d = parse_date(cell);
  if (!d) throw Error(ErrorKind::ParseError, "bad date '" + cell + "', expected YYYY-MM-DD" + at_line(line));
  return *d;
}

struct Header {
  std::map<std::string, std::size_t> index;

  std::optional<std::size_t> find(const std::string& name) const {
    auto it = index.find(name);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
  std::size_t require(const std::string& name) const {
    auto i = find(name);
    if (!i) throw Error(ErrorKind::SchemaError, "missing required column '" + name + "'");
    return *i;
  }
};

Header read_header(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw Error(ErrorKind::SchemaError, "missing header row");
  Header h;
  const auto cols = split_csv(line);
  for (std::size_t i = 0; i < cols.size(); ++i) h.index[cols[i]] = i;
  return h;
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return in;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json spec_params(const SmootherSpec& spec) {
  json p = json::object();
  const auto bounds = spec.bounds();
  for (std::size_t i = 0; i < spec.params.size() && i < bounds.size(); ++i) {
    p[std::string(bounds[i].name)] = spec.params[i];
  }
  return p;
}

SmootherSpec spec_from_json(MethodId method, const json& params) {
  SmootherSpec spec{method, {}};
  // Methods that failed are stored without parameters.
  for (const auto& b : spec.bounds()) {
    if (!params.contains(std::string(b.name))) break;
    spec.params.push_back(params.at(std::string(b.name)).get<double>());
  }
  return spec;
}

MethodId method_from_json(const json& j) {
  auto m = parse_method(j.get<std::string>());
  if (!m) throw Error(ErrorKind::SchemaError, "unknown method '" + j.get<std::string>() + "' in report");
  return *m;
}

ClusterLabel label_from_string(const std::string& s) {
  if (s == "best") return ClusterLabel::Best;
  if (s == "middle") return ClusterLabel::Middle;
  if (s == "worst") return ClusterLabel::Worst;
  throw Error(ErrorKind::SchemaError, "unknown cluster label '" + s + "'");
}

json report_to_json(const BenchmarkReport& r) {
  json j;
  j["site"] = r.site;
  j["signal_kind"] = std::string(to_string(r.kind));
  j["optimal_method"] = method_label(r.optimal);
  j["optimal_params"] = spec_params(r.optimal_spec);

  json methods = json::array();
  for (const auto& m : r.methods) {
    json e;
    e["method"] = method_label(m.method);
    e["ok"] = m.ok;
    e["error"] = m.error;
    e["params"] = spec_params(m.spec);
    e["k"] = m.index.k;
    e["mae"] = m.index.mae;
    e["var"] = m.index.var;
    e["aic"] = number_or_null(m.index.aic);
    e["aic_zero_residual"] = m.index.zero_residual;
    e["ga_evaluations"] = m.ga_evaluations;
    e["ga_generations"] = m.ga_generations;
    methods.push_back(std::move(e));
  }
  j["methods"] = std::move(methods);

  json clusters = json::array();
  for (std::size_t i = 0; i < r.clusters.methods.size(); ++i) {
    const MethodId id = r.clusters.methods[i];
    const auto& s = r.scores[i];
    json e;
    e["method"] = method_label(id);
    e["cluster"] = std::string(to_string(r.clusters.labels[i]));
    e["features"] = {s.features[0], s.features[1], s.features[2]};
    e["z_features"] = {s.z_features[0], s.z_features[1], s.z_features[2]};
    e["is_medoid"] = r.clusters.medoids[static_cast<std::size_t>(r.clusters.labels[i])] == id;
    e["is_optimal"] = id == r.optimal;
    clusters.push_back(std::move(e));
  }
  j["clusters"] = std::move(clusters);
  j["medoids"] = {method_label(r.clusters.medoids[0]), method_label(r.clusters.medoids[1]),
                  method_label(r.clusters.medoids[2])};
  j["cluster_cost"] = r.clusters.cost;

  json series;
  json dates = json::array();
  for (auto d : r.dates) dates.push_back(format_date(d));
  series["date"] = std::move(dates);
  series["original"] = r.original;
  series["smoothed"] = r.smoothed;
  series["ci_lower"] = r.band_lower;
  series["ci_upper"] = r.band_upper;
  j["series"] = std::move(series);

  if (r.loocv) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < r.loocv->rows(); ++i) {
      std::vector<double> row(static_cast<std::size_t>(r.loocv->cols()));
      for (Eigen::Index c = 0; c < r.loocv->cols(); ++c) row[static_cast<std::size_t>(c)] = (*r.loocv)(i, c);
      rows.push_back(row);
    }
    j["loocv"] = std::move(rows);
  } else {
    j["loocv"] = nullptr;
  }
  if (r.regression) {
    j["regression"] = {{"slope", r.regression->slope},
                       {"intercept", r.regression->intercept},
                       {"r2", r.regression->r_squared},
                       {"n", r.regression->n}};
  } else {
    j["regression"] = nullptr;
  }
  j["warnings"] = r.warnings;
  j["provenance"] = {{"tool_version", r.provenance.tool_version},
                     {"config_hash", r.provenance.config_hash},
                     {"seed", r.provenance.master_seed},
                     {"smoother_evaluations", r.provenance.smoother_evaluations},
                     {"loocv_builds", r.provenance.loocv_builds}};
  return j;
}

BenchmarkReport report_from_json(const json& j) {
  BenchmarkReport r;
  r.site = j.at("site").get<std::string>();
  const auto kind = j.at("signal_kind").get<std::string>();
  if (kind != "raw" && kind != "normalized") throw Error(ErrorKind::SchemaError, "unknown signal kind " + kind);
  r.kind = kind == "raw" ? SignalKind::Raw : SignalKind::Normalized;
  r.optimal = method_from_json(j.at("optimal_method"));
  r.optimal_spec = spec_from_json(r.optimal, j.at("optimal_params"));

  for (const auto& e : j.at("methods")) {
    MethodOutcome m;
    m.method = method_from_json(e.at("method"));
    m.ok = e.at("ok").get<bool>();
    m.error = e.at("error").get<std::string>();
    m.spec = spec_from_json(m.method, e.at("params"));
    m.index.method = m.method;
    m.index.k = e.at("k").get<int>();
    m.index.mae = e.at("mae").get<double>();
    m.index.var = e.at("var").get<double>();
    m.index.zero_residual = e.at("aic_zero_residual").get<bool>();
    m.index.aic = e.at("aic").is_null() ? -std::numeric_limits<double>::infinity() : e.at("aic").get<double>();
    m.ga_evaluations = e.at("ga_evaluations").get<std::size_t>();
    m.ga_generations = e.at("ga_generations").get<std::size_t>();
    r.methods.push_back(std::move(m));
  }
  for (const auto& e : j.at("clusters")) {
    const MethodId id = method_from_json(e.at("method"));
    MethodScore s{id, {}, {}};
    for (std::size_t f = 0; f < 3; ++f) {
      s.features[f] = e.at("features").at(f).get<double>();
      s.z_features[f] = e.at("z_features").at(f).get<double>();
    }
    r.scores.push_back(s);
    r.clusters.methods.push_back(id);
    r.clusters.labels.push_back(label_from_string(e.at("cluster").get<std::string>()));
  }
  for (std::size_t c = 0; c < 3; ++c) r.clusters.medoids[c] = method_from_json(j.at("medoids").at(c));
  r.clusters.optimal = r.optimal;
  r.clusters.cost = j.at("cluster_cost").get<double>();

  const auto& series = j.at("series");
  for (const auto& d : series.at("date")) {
    auto date = parse_date(d.get<std::string>());
    if (!date) throw Error(ErrorKind::SchemaError, "bad date in report");
    r.dates.push_back(*date);
  }
  r.original = series.at("original").get<std::vector<double>>();
  r.smoothed = series.at("smoothed").get<std::vector<double>>();
  r.band_lower = series.at("ci_lower").get<std::vector<double>>();
  r.band_upper = series.at("ci_upper").get<std::vector<double>>();

  if (!j.at("loocv").is_null()) {
    const auto rows = j.at("loocv").get<std::vector<std::vector<double>>>();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) throw Error(ErrorKind::SchemaError, "cross-validation matrix is not square");
      for (std::size_t c = 0; c < rows.size(); ++c) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    }
    r.loocv = std::move(m);
  }
  if (!j.at("regression").is_null()) {
    const auto& g = j.at("regression");
    r.regression = LinearFit{g.at("slope").get<double>(), g.at("intercept").get<double>(), g.at("r2").get<double>(),
                             g.at("n").get<std::size_t>()};
  }
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  const auto& p = j.at("provenance");
  r.provenance.tool_version = p.at("tool_version").get<std::string>();
  r.provenance.config_hash = p.at("config_hash").get<std::string>();
  r.provenance.master_seed = p.at("seed").get<std::uint64_t>();
  r.provenance.smoother_evaluations = p.at("smoother_evaluations").get<std::size_t>();
  r.provenance.loocv_builds = p.at("loocv_builds").get<std::size_t>();
  return r;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<SurveillanceRecord> read_surveillance_csv(std::istream& in, const UnitConfig& units) {
  const Header h = read_header(in);
  const auto c_date = h.require("date");
  const auto c_site = h.require("site");
  const auto c_virus = h.require("virus_copies_per_ml");
  const auto c_flow = h.require("flow_m3_per_d");
  const auto c_nh4 = h.require("nh4_mg_per_l");
  const auto c_cases = h.find("active_cases");
  const auto c_inc = h.find("incidence_7d_per_100k");

  std::vector<SurveillanceRecord> out;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() < h.index.size()) {
      throw Error(ErrorKind::ParseError, "expected " + std::to_string(h.index.size()) + " cells, got " +
                                             std::to_string(cells.size()) + at_line(lineno));
    }
    SurveillanceRecord r;
    r.date = parse_date_cell(cells[c_date], lineno);
    r.site = cells[c_site];
    if (r.site.empty()) throw Error(ErrorKind::ParseError, "empty site" + at_line(lineno));
    auto scaled = [&](std::size_t col, std::string_view name, double factor) -> std::optional<double> {
      auto v = parse_cell(cells[col], lineno, name);
      if (v && *v < 0.0) throw Error(ErrorKind::ParseError, "negative " + std::string(name) + at_line(lineno));
      if (v) *v *= factor;
      return v;
    };
    r.c_virus = scaled(c_virus, "virus_copies_per_ml", units.virus_to_copies_per_l);
    r.q_flow = scaled(c_flow, "flow_m3_per_d", units.flow_to_l_per_d);
    r.c_nh4 = scaled(c_nh4, "nh4_mg_per_l", units.nh4_to_g_per_l);
    if (c_cases) r.active_cases = scaled(*c_cases, "active_cases", 1.0);
    if (c_inc) r.incidence_7d = scaled(*c_inc, "incidence_7d_per_100k", 1.0);
    out.push_back(std::move(r));
  }
  if (out.empty()) throw Error(ErrorKind::EmptyInput, "no data rows");
  return out;
}

std::vector<SurveillanceRecord> read_surveillance_csv(const std::filesystem::path& path, const UnitConfig& units) {
  auto in = open_in(path);
  return read_surveillance_csv(in, units);
}

void write_surveillance_csv(std::ostream& out, std::span<const SurveillanceRecord> records, const UnitConfig& units) {
  out << "date,site,virus_copies_per_ml,flow_m3_per_d,nh4_mg_per_l,active_cases,incidence_7d_per_100k\n";
  auto unscale = [](const std::optional<double>& v, double factor) -> std::optional<double> {
    if (!v) return std::nullopt;
    return *v / factor;
  };
  for (const auto& r : records) {
    out << format_date(r.date) << ',' << r.site << ',' << opt_number(unscale(r.c_virus, units.virus_to_copies_per_l))
        << ',' << opt_number(unscale(r.q_flow, units.flow_to_l_per_d)) << ','
        << opt_number(unscale(r.c_nh4, units.nh4_to_g_per_l)) << ',' << opt_number(r.active_cases) << ','
        << opt_number(r.incidence_7d) << '\n';
  }
}

std::vector<SurveillanceRecord> filter_site(std::span<const SurveillanceRecord> records, const std::string& site) {
  std::vector<SurveillanceRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [&](const SurveillanceRecord& r) { return r.site == site; });
  if (out.empty()) throw Error(ErrorKind::SchemaError, "no records for site '" + site + "'");
  return out;
}

std::vector<std::string> sites_of(std::span<const SurveillanceRecord> records) {
  std::vector<std::string> out;
  for (const auto& r : records) {
    if (std::find(out.begin(), out.end(), r.site) == out.end()) out.push_back(r.site);
  }
  return out;
}

TimeSeries read_series_csv(std::istream& in) {
  const Header h = read_header(in);
  const auto c_date = h.require("date");
  const auto c_value = h.require("value");
  std::vector<Sample> samples;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() <= std::max(c_date, c_value)) throw Error(ErrorKind::ParseError, "short row" + at_line(lineno));
    samples.push_back({parse_date_cell(cells[c_date], lineno), parse_cell(cells[c_value], lineno, "value")});
  }
  std::stable_sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].date == samples[i - 1].date) {
      throw Error(ErrorKind::DuplicateTimestamp, "two rows share date " + format_date(samples[i].date));
    }
  }
  return TimeSeries(std::move(samples));
}

void write_series_csv(std::ostream& out, const TimeSeries& series, std::string_view value_name) {
  out << "date," << value_name << '\n';
  for (const auto& s : series.samples()) out << format_date(s.date) << ',' << opt_number(s.value) << '\n';
}

std::vector<SiteBiomarkerLoad> read_biomarker_table(std::istream& in) {
  const Header h = read_header(in);
  const auto c_site = h.require("site");
  const auto c_f = h.require("f_bm_g_per_cap_d");
  const auto c_lo = h.require("p025");
  const auto c_hi = h.require("p975");
  std::vector<SiteBiomarkerLoad> out;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() < h.index.size()) throw Error(ErrorKind::ParseError, "short row" + at_line(lineno));
    auto need = [&](std::size_t col, std::string_view name) {
      auto v = parse_cell(cells[col], lineno, name);
      if (!v) throw Error(ErrorKind::ParseError, "empty " + std::string(name) + at_line(lineno));
      return *v;
    };
    SiteBiomarkerLoad row{cells[c_site], {}};
    row.load.f_bm = need(c_f, "f_bm_g_per_cap_d");
    row.load.p_med = row.load.f_bm;
    row.load.p_low = need(c_lo, "p025");
    row.load.p_high = need(c_hi, "p975");
    if (!(row.load.f_bm > 0.0)) {
      throw Error(ErrorKind::NonPositiveBiomarkerLoad, "site " + row.site + at_line(lineno));
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<SiteBiomarkerLoad> read_biomarker_table(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_biomarker_table(in);
}

void write_biomarker_table(std::ostream& out, std::span<const SiteBiomarkerLoad> table) {
  out << "site,f_bm_g_per_cap_d,p025,p975\n";
  for (const auto& row : table) {
    out << row.site << ',' << format_number(row.load.f_bm) << ',' << format_number(row.load.p_low) << ','
        << format_number(row.load.p_high) << '\n';
  }
}

void write_smoothed_csv(std::ostream& out, const BenchmarkReport& r) {
  out << "date,original,smoothed,ci_lower,ci_upper\n";
  for (std::size_t i = 0; i < r.dates.size(); ++i) {
    out << format_date(r.dates[i]) << ',' << format_number(r.original[i]) << ',' << format_number(r.smoothed[i])
        << ',' << format_number(r.band_lower[i]) << ',' << format_number(r.band_upper[i]) << '\n';
  }
}

void write_clusters_csv(std::ostream& out, const BenchmarkReport& r) {
  out << "method,var,err,aic,cluster,is_medoid,is_optimal\n";
  for (std::size_t i = 0; i < r.clusters.methods.size(); ++i) {
    const MethodId id = r.clusters.methods[i];
    const PerformanceIndex* index = nullptr;
    for (const auto& m : r.methods) {
      if (m.method == id) index = &m.index;
    }
    const auto label = r.clusters.labels[i];
    const bool medoid = r.clusters.medoids[static_cast<std::size_t>(label)] == id;
    out << method_label(id) << ',' << format_number(index->var) << ',' << format_number(index->mae) << ','
        << (std::isfinite(index->aic) ? format_number(index->aic) : std::string("-inf")) << ',' << to_string(label)
        << ',' << (medoid ? 1 : 0) << ',' << (id == r.optimal ? 1 : 0) << '\n';
  }
}

void write_regression_csv(std::ostream& out, std::span<const BenchmarkReport> reports) {
  out << "site,slope,intercept,r2,n\n";
  // One row per site; a normalized-signal fit takes precedence over a raw one.
  std::vector<const BenchmarkReport*> chosen;
  for (const auto& r : reports) {
    if (!r.regression) continue;
    auto it = std::find_if(chosen.begin(), chosen.end(), [&](const BenchmarkReport* c) { return c->site == r.site; });
    if (it == chosen.end()) {
      chosen.push_back(&r);
    } else if (r.kind == SignalKind::Normalized) {
      *it = &r;
    }
  }
  for (const auto* r : chosen) {
    out << r->site << ',' << format_number(r->regression->slope) << ',' << format_number(r->regression->intercept)
        << ',' << format_number(r->regression->r_squared) << ',' << r->regression->n << '\n';
  }
}

std::string report_json(std::span<const BenchmarkReport> reports) {
  json root;
  root["schema_version"] = 1;
  root["tool_version"] = std::string(kToolVersion);
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  root["reports"] = std::move(arr);
  return root.dump(2) + "\n";
}

std::vector<BenchmarkReport> parse_report_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("report is not valid JSON: ") + e.what());
  }
  try {
    if (root.at("schema_version").get<int>() != 1) throw Error(ErrorKind::SchemaError, "unsupported report schema");
    std::vector<BenchmarkReport> out;
    for (const auto& r : root.at("reports")) out.push_back(report_from_json(r));
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("malformed report: ") + e.what());
  }
}

std::vector<std::filesystem::path> write_report(std::span<const BenchmarkReport> reports,
                                                const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<fs::path> written;
  auto emit = [&](const fs::path& path, auto&& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    writer(out);
    out.close();
    if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
    written.push_back(path);
  };
  emit(dir / "report.json", [&](std::ostream& o) { o << report_json(reports); });
  for (const auto& r : reports) {
    const std::string tag(file_tag(r.kind));
    emit(dir / ("smoothed_" + tag + ".csv"), [&](std::ostream& o) { write_smoothed_csv(o, r); });
    emit(dir / ("clusters_" + tag + ".csv"), [&](std::ostream& o) { write_clusters_csv(o, r); });
  }
  if (!reports.empty()) {
    emit(dir / "clusters.csv", [&](std::ostream& o) { write_clusters_csv(o, reports.front()); });
  }
  emit(dir / "regression.csv", [&](std::ostream& o) { write_regression_csv(o, reports); });
  return written;
}

}  // namespace smoothbench
