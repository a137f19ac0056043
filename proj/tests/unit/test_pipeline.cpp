#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "smoothbench/error.hpp"
#include "smoothbench/io.hpp"
#include "smoothbench/pipeline.hpp"
#include "smoothbench/synthetic.hpp"

using namespace smoothbench;

namespace {

PipelineConfig quick_config() {
  PipelineConfig c;
  c.ga.population_size = 10;
  c.ga.iterations = 6;
  return c;
}

std::vector<SurveillanceRecord> bundled() {
  return read_surveillance_csv(std::filesystem::path(SMOOTHBENCH_DATA_DIR) / "synthetic_site.csv");
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Internal;
}

}  // namespace

TEST_CASE("bundled data set benchmark is complete") {
  const auto records = bundled();
  REQUIRE(records.size() == 60);
  const auto r = run_benchmark(records, SignalKind::Raw, quick_config());
  CHECK(r.methods.size() == 13);
  CHECK(r.clusters.methods.size() == 13);
  for (const auto& m : r.methods) CHECK(m.ok);
  std::vector<ClusterLabel> labels = r.clusters.labels;
  std::sort(labels.begin(), labels.end());
  CHECK(std::unique(labels.begin(), labels.end()) - labels.begin() == 3);
  CHECK(std::find(r.clusters.methods.begin(), r.clusters.methods.end(), r.optimal) != r.clusters.methods.end());
  CHECK(r.optimal_spec.method == r.optimal);
  CHECK(r.smoothed.size() == 60);
  for (std::size_t i = 0; i < r.smoothed.size(); ++i) CHECK(r.band_lower[i] <= r.band_upper[i]);
  CHECK(r.regression);
  CHECK(r.provenance.master_seed == 42);
  CHECK(r.provenance.tool_version == kToolVersion);
}

TEST_CASE("benchmark is reproducible to the byte") {
  const auto records = bundled();
  const std::vector<BenchmarkReport> a{run_benchmark(records, SignalKind::Raw, quick_config())};
  const std::vector<BenchmarkReport> b{run_benchmark(records, SignalKind::Raw, quick_config())};
  CHECK(report_json(a) == report_json(b));
  auto other = quick_config();
  other.master_seed = 7;
  CHECK(run_benchmark(records, SignalKind::Raw, other).provenance.config_hash != a[0].provenance.config_hash);
}

TEST_CASE("constant input takes the degenerate path deterministically") {
  std::vector<SurveillanceRecord> flat;
  const Date d{std::chrono::year{2020} / 1 / 1};
  for (int i = 0; i < 10; ++i) {
    SurveillanceRecord r;
    r.site = "A";
    r.date = d + std::chrono::days{i};
    r.c_virus = 3e4;
    r.c_nh4 = 0.03;
    flat.push_back(r);
  }
  const auto a = run_benchmark(flat, SignalKind::Raw, quick_config());
  const auto b = run_benchmark(flat, SignalKind::Raw, quick_config());
  for (const auto& m : a.methods) {
    if (!m.ok) continue;
    CHECK(m.index.mae <= 1e-6 * 3e4);
  }
  CHECK(a.optimal == b.optimal);
  CHECK(a.clusters == b.clusters);
}

TEST_CASE("normalized run needs NH4") {
  auto records = bundled();
  for (auto& r : records) r.c_nh4.reset();
  CHECK_NOTHROW(run_benchmark(records, SignalKind::Raw, quick_config()));
  CHECK(kind_of([&] { run_raw_and_normalized(records, quick_config()); }) == ErrorKind::MissingBiomarker);
}

TEST_CASE("raw and normalized runs are tagged and independent") {
  const auto [raw, norm] = run_raw_and_normalized(bundled(), quick_config());
  CHECK(raw.kind == SignalKind::Raw);
  CHECK(norm.kind == SignalKind::Normalized);
  CHECK(raw.original != norm.original);
}

TEST_CASE("constant NH4 makes the normalized signal proportional to the raw one") {
  SyntheticSite p;
  p.constant_nh4 = true;
  const auto records = make_synthetic_site(p, 40, 42);
  auto config = quick_config();
  config.methods = {MethodId::SMA, MethodId::RRM, MethodId::TUK, MethodId::SPL,
                    MethodId::KER, MethodId::POL, MethodId::SGF, MethodId::FFT};
  const auto [raw, norm] = run_raw_and_normalized(records, config);
  const double ratio = norm.original[0] / raw.original[0];
  for (std::size_t i = 0; i < raw.original.size(); ++i) {
    CHECK(norm.original[i] == doctest::Approx(ratio * raw.original[i]).epsilon(1e-13));
  }
  CHECK(raw.optimal == norm.optimal);
}

TEST_CASE("reclustering stored indices reproduces the clusters") {
  const auto config = quick_config();
  const auto r = run_benchmark(bundled(), SignalKind::Normalized, config);
  CHECK(recluster(r, config) == r.clusters);
  const auto parsed = parse_report_json(report_json(std::vector<BenchmarkReport>{r}));
  CHECK(recluster(parsed[0], config) == r.clusters);
}

TEST_CASE("per-method seeds do not depend on the method set") {
  auto all = quick_config();
  auto some = quick_config();
  some.methods = {MethodId::KER, MethodId::TUK, MethodId::SPL};
  const auto a = run_benchmark(bundled(), SignalKind::Raw, all);
  const auto b = run_benchmark(bundled(), SignalKind::Raw, some);
  auto find = [](const BenchmarkReport& r, MethodId id) {
    return *std::find_if(r.methods.begin(), r.methods.end(), [&](const MethodOutcome& m) { return m.method == id; });
  };
  for (MethodId id : some.methods) {
    CHECK(find(a, id).spec == find(b, id).spec);
    CHECK(find(a, id).index == find(b, id).index);
  }
}

TEST_CASE("provenance counts the smoother evaluations") {
  const auto r = run_benchmark(bundled(), SignalKind::Raw, quick_config());
  std::size_t ga = 0, ok = 0;
  for (const auto& m : r.methods) {
    ga += m.ga_evaluations;
    ok += m.ok ? 1 : 0;
  }
  CHECK(r.provenance.loocv_builds == ga + ok);
  CHECK(r.provenance.smoother_evaluations == r.provenance.loocv_builds * r.original.size() + 1);
}

TEST_CASE("missing samples are dropped from the signal") {
  auto records = bundled();
  records[10].c_virus.reset();
  records[20].c_nh4.reset();
  const auto raw = prepare_signal(records, SignalKind::Raw, quick_config());
  const auto norm = prepare_signal(records, SignalKind::Normalized, quick_config());
  CHECK(raw.size() == 59);
  CHECK(norm.size() == 58);
  CHECK_FALSE(raw.has_missing());
}

TEST_CASE("specific NH4 load lookup order") {
  PipelineConfig c;
  CHECK(resolve_f_nh4("A", c) == 10.71);
  c.biomarker_table = {{"A", {9.0, 8.0, 9.0, 10.0}}, {"Z", {7.0, 6.0, 7.0, 8.0}}};
  CHECK(resolve_f_nh4("A", c) == 9.0);
  CHECK(resolve_f_nh4("Z", c) == 7.0);
  CHECK(kind_of([&] { resolve_f_nh4("Q", c); }) == ErrorKind::MissingBiomarkerLoad);
  c.f_nh4 = 5.5;
  CHECK(resolve_f_nh4("Q", c) == 5.5);
}
