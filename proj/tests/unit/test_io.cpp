#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "smoothbench/error.hpp"
#include "smoothbench/io.hpp"
#include "smoothbench/synthetic.hpp"

using namespace smoothbench;

namespace {

const char* kHeader = "date,site,virus_copies_per_ml,flow_m3_per_d,nh4_mg_per_l\n";

ErrorKind kind_of(auto&& fn, std::string* message = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Internal;
}

std::vector<SurveillanceRecord> parse(const std::string& text, const UnitConfig& units = {}) {
  std::istringstream in(text);
  return read_surveillance_csv(in, units);
}

PipelineConfig quick_config() {
  PipelineConfig c;
  c.ga.population_size = 8;
  c.ga.iterations = 4;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("surveillance rows are converted to internal units") {
  const auto r = parse(std::string(kHeader) + "2020-10-01,A,100,539500,30\n");
  REQUIRE(r.size() == 1);
  CHECK(r[0].site == "A");
  CHECK(format_date(r[0].date) == "2020-10-01");
  CHECK(*r[0].c_virus == doctest::Approx(1e5).epsilon(1e-15));
  CHECK(*r[0].q_flow == doctest::Approx(5.395e8).epsilon(1e-15));
  CHECK(*r[0].c_nh4 == doctest::Approx(0.03).epsilon(1e-15));
  CHECK_FALSE(r[0].incidence_7d);
}

TEST_CASE("empty cells are missing values") {
  const auto r = parse(std::string(kHeader) + "2020-10-01,A,100,539500,\r\n2020-10-02,A,,539500,31\n");
  CHECK_FALSE(r[0].c_nh4);
  CHECK_FALSE(r[1].c_virus);
  CHECK(r[1].c_nh4);
}

TEST_CASE("malformed input is rejected with the line number") {
  std::string msg;
  CHECK(kind_of([] { parse(std::string(kHeader) + "2020-10-01,A,1,2,3\n01/10/2020,A,100,539500,30\n"); }, &msg) ==
        ErrorKind::ParseError);
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(kind_of([] { parse(std::string(kHeader) + "2020-10-01,A,abc,539500,30\n"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { parse(std::string(kHeader) + "2020-10-01,A,-1,539500,30\n"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { parse("date,site,virus_copies_per_ml,flow_m3_per_d\n2020-10-01,A,1,2\n"); }, &msg) ==
        ErrorKind::SchemaError);
  CHECK(msg.find("nh4_mg_per_l") != std::string::npos);
  CHECK(kind_of([] { parse(""); }) == ErrorKind::SchemaError);
  CHECK(kind_of([] { parse(kHeader); }) == ErrorKind::EmptyInput);
}

TEST_CASE("surveillance CSV round trip is lossless") {
  const auto records = make_catchment_dataset(20, 3);
  const UnitConfig identity{1.0, 1.0, 1.0};
  std::ostringstream a;
  write_surveillance_csv(a, records, identity);
  const auto back = parse(a.str(), identity);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].c_virus == records[i].c_virus);
    CHECK(back[i].q_flow == records[i].q_flow);
    CHECK(back[i].c_nh4 == records[i].c_nh4);
    CHECK(back[i].incidence_7d == records[i].incidence_7d);
    CHECK(back[i].active_cases == records[i].active_cases);
    CHECK(back[i].date == records[i].date);
  }
  std::ostringstream b;
  write_surveillance_csv(b, back, identity);
  CHECK(a.str() == b.str());

  std::ostringstream c;
  write_surveillance_csv(c, records);
  const auto scaled = parse(c.str());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(*scaled[i].c_virus == doctest::Approx(*records[i].c_virus).epsilon(1e-15));
  }
}

TEST_CASE("site helpers") {
  const auto records = make_catchment_dataset(6, 1);
  CHECK(sites_of(records) == std::vector<std::string>{"A", "B", "C", "D"});
  CHECK(filter_site(records, "C").size() == 6);
  CHECK(kind_of([&] { filter_site(records, "Q"); }) == ErrorKind::SchemaError);
}

TEST_CASE("series CSV") {
  std::istringstream in("date,value\n2020-01-02,2\n2020-01-01,1\n2020-01-03,\n");
  const auto s = read_series_csv(in);
  CHECK(s.size() == 3);
  CHECK(*s[0].value == 1.0);
  CHECK(s[2].missing());
  std::ostringstream out;
  write_series_csv(out, s);
  CHECK(out.str() == "date,value\n2020-01-01,1\n2020-01-02,2\n2020-01-03,\n");
  std::istringstream dup("date,value\n2020-01-01,1\n2020-01-01,2\n");
  CHECK(kind_of([&] { read_series_csv(dup); }) == ErrorKind::DuplicateTimestamp);
}

TEST_CASE("reference loads round trip through the table CSV") {
  std::ostringstream out;
  write_biomarker_table(out, reference_nh4_loads());
  std::istringstream in(out.str());
  const auto back = read_biomarker_table(in);
  REQUIRE(back.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& ref = reference_nh4_loads()[i];
    CHECK(back[i].site == ref.site);
    CHECK(back[i].load.f_bm == ref.load.f_bm);
    CHECK(back[i].load.p_low == ref.load.p_low);
    CHECK(back[i].load.p_high == ref.load.p_high);
  }
  CHECK(back[0].load.f_bm == 10.71);
  const std::filesystem::path shipped = std::filesystem::path(SMOOTHBENCH_DATA_DIR) / "biomarker_reference.csv";
  CHECK(slurp(shipped) == out.str());
}

TEST_CASE("numbers keep seventeen significant digits") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, -2.5}) {
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(1.5) == "1.5");
  CHECK(format_number(2.0) == "2");
}

TEST_CASE("report files re-parse and re-render byte for byte") {
  const auto records = make_synthetic_site(SyntheticSite{}, 24, 5);
  auto config = quick_config();
  config.keep_loocv = true;
  std::vector<BenchmarkReport> reports{run_benchmark(records, SignalKind::Raw, config),
                                       run_benchmark(records, SignalKind::Normalized, config)};
  const auto json = report_json(reports);
  const auto parsed = parse_report_json(json);
  CHECK(report_json(parsed) == json);

  const auto dir = std::filesystem::temp_directory_path() / "smoothbench_io_test";
  std::filesystem::remove_all(dir);
  const auto paths = write_report(reports, dir / "first");
  for (const char* f : {"report.json", "smoothed_raw.csv", "smoothed_norm.csv", "clusters.csv", "regression.csv",
                        "clusters_raw.csv", "clusters_norm.csv"}) {
    CHECK(std::filesystem::exists(dir / "first" / f));
  }
  write_report(parse_report_json(slurp(dir / "first" / "report.json")), dir / "second");
  for (const auto& p : paths) CHECK(slurp(p) == slurp(dir / "second" / p.filename()));

  std::istringstream clusters(slurp(dir / "first" / "clusters.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(clusters, line)) ++rows;
  CHECK(rows == 13);
  std::filesystem::remove_all(dir);
}

TEST_CASE("vanishing AIC survives the JSON round trip") {
  std::vector<SurveillanceRecord> flat;
  Date d{std::chrono::year{2020} / 1 / 1};
  for (int i = 0; i < 8; ++i) {
    SurveillanceRecord r;
    r.site = "A";
    r.date = d + std::chrono::days{i};
    r.c_virus = 5e4;
    flat.push_back(r);
  }
  const std::vector<BenchmarkReport> reports{run_benchmark(flat, SignalKind::Raw, quick_config())};
  const auto parsed = parse_report_json(report_json(reports));
  for (std::size_t i = 0; i < reports[0].methods.size(); ++i) {
    CHECK(parsed[0].methods[i].index == reports[0].methods[i].index);
  }
  CHECK(kind_of([] { parse_report_json("{not json"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { parse_report_json("{\"schema_version\": 1}"); }) == ErrorKind::SchemaError);
}
