#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "smoothbench/error.hpp"
#include "smoothbench/random.hpp"
#include "smoothbench/timeseries.hpp"

using namespace smoothbench;

namespace {

Date day(int y, unsigned m, unsigned d) { return Date{std::chrono::year{y} / m / d}; }

SurveillanceRecord rec(Date date, std::optional<double> virus, std::optional<double> nh4 = 0.03) {
  SurveillanceRecord r;
  r.site = "A";
  r.date = date;
  r.c_virus = virus;
  r.q_flow = 1e8;
  r.c_nh4 = nh4;
  return r;
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

TimeSeries with_gaps(std::vector<std::optional<double>> values) {
  std::vector<Sample> s;
  Date d = day(2020, 1, 1);
  for (auto v : values) {
    s.push_back({d, v});
    d += std::chrono::days{1};
  }
  return TimeSeries(std::move(s));
}

std::vector<double> observed(const TimeSeries& s) {
  std::vector<double> out;
  for (const auto& x : s.samples()) out.push_back(*x.value);
  return out;
}

}  // namespace

TEST_CASE("dates parse only in strict ISO form") {
  CHECK(parse_date("2020-10-01") == day(2020, 10, 1));
  CHECK(format_date(day(2020, 2, 29)) == "2020-02-29");
  CHECK_FALSE(parse_date("01/10/2020"));
  CHECK_FALSE(parse_date("2020-1-01"));
  CHECK_FALSE(parse_date("2021-02-29"));
  CHECK_FALSE(parse_date("2020-10-01x"));
}

TEST_CASE("time series rejects unordered dates and non-finite values") {
  CHECK(kind_of([] { TimeSeries({{day(2020, 1, 2), 1.0}, {day(2020, 1, 1), 2.0}}); }) ==
        ErrorKind::DuplicateTimestamp);
  CHECK_THROWS_AS(TimeSeries({{day(2020, 1, 1), std::nan("")}}), Error);
  CHECK_THROWS_AS(TimeSeries({{day(2020, 1, 1), std::nullopt}}), Error);
  CHECK_THROWS_AS(TimeSeries(std::vector<Sample>{}), Error);
}

TEST_CASE("build_series orders records by date") {
  std::vector<SurveillanceRecord> rs{rec(day(2020, 3, 3), 3.0), rec(day(2020, 3, 1), 1.0), rec(day(2020, 3, 2), 2.0)};
  const auto s = build_series(rs, RecordField::Virus);
  REQUIRE(s.size() == 3);
  CHECK(s.values() == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(s[0].date == day(2020, 3, 1));
  CHECK(s[2].date == day(2020, 3, 3));
}

TEST_CASE("build_series rejects shared dates, empty input and mixed sites") {
  std::vector<SurveillanceRecord> dup{rec(day(2020, 3, 1), 1.0), rec(day(2020, 3, 1), 2.0)};
  CHECK(kind_of([&] { build_series(dup, RecordField::Virus); }) == ErrorKind::DuplicateTimestamp);
  CHECK(kind_of([] { build_series({}, RecordField::Virus); }) == ErrorKind::EmptyInput);
  std::vector<SurveillanceRecord> mixed{rec(day(2020, 3, 1), 1.0), rec(day(2020, 3, 2), 2.0)};
  mixed[1].site = "B";
  CHECK(kind_of([&] { build_series(mixed, RecordField::Virus); }) == ErrorKind::MixedSites);
}

TEST_CASE("an absent field becomes a missing slot") {
  std::vector<SurveillanceRecord> rs{rec(day(2020, 3, 1), 1.0), rec(day(2020, 3, 2), 2.0, std::nullopt),
                                     rec(day(2020, 3, 3), 3.0)};
  const auto s = build_series(rs, RecordField::Nh4);
  CHECK(s.size() == 3);
  CHECK(s.observed_count() == 2);
  CHECK(s[1].missing());
}

TEST_CASE("impute_linear fills interior gaps linearly and ends by nearest value") {
  CHECK(observed(impute_linear(with_gaps({1.0, std::nullopt, 3.0}))) == std::vector<double>{1, 2, 3});
  CHECK(observed(impute_linear(with_gaps({std::nullopt, 4.0, 8.0}))) == std::vector<double>{4, 4, 8});
  const auto two = observed(impute_linear(with_gaps({0.0, std::nullopt, std::nullopt, 9.0})));
  CHECK(two[1] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(two[2] == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(observed(impute_linear(with_gaps({2.0, 5.0, std::nullopt}))) == std::vector<double>{2, 5, 5});
  CHECK(kind_of([] { impute_linear(with_gaps({1.0, std::nullopt})); }) == ErrorKind::InsufficientData);
}

TEST_CASE("impute_linear is idempotent") {
  Rng rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + uniform_index(rng, 30);
    std::vector<std::optional<double>> v(n);
    for (auto& x : v) x = uniform01(rng) < 0.3 ? std::nullopt : std::optional<double>(standard_normal(rng));
    v[uniform_index(rng, n)] = 1.0;
    std::size_t j = uniform_index(rng, n);
    while (v[j].has_value() && std::count_if(v.begin(), v.end(), [](auto& o) { return o.has_value(); }) < 2) {
      j = (j + 1) % n;
    }
    v[j] = 2.0;
    if (std::count_if(v.begin(), v.end(), [](auto& o) { return o.has_value(); }) < 2) continue;
    const auto once = impute_linear(with_gaps(v));
    CHECK_FALSE(once.has_missing());
    CHECK(impute_linear(once) == once);
  }
}

TEST_CASE("percentile uses the inclusive convention") {
  const std::vector<double> odd{5, 6, 7};
  const std::vector<double> even{1, 2, 3, 4};
  const std::vector<double> one{9};
  CHECK(percentile(odd, 0.5) == 6.0);
  CHECK(percentile(even, 0.5) == 2.5);
  CHECK(percentile(one, 0.975) == 9.0);
  CHECK(kind_of([] { percentile(std::vector<double>{}, 0.5); }) == ErrorKind::EmptyInput);
}

TEST_CASE("percentile endpoints and monotonicity") {
  Rng rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> v(1 + uniform_index(rng, 40));
    for (auto& x : v) x = standard_normal(rng);
    CHECK(percentile(v, 0.0) == *std::min_element(v.begin(), v.end()));
    CHECK(percentile(v, 1.0) == *std::max_element(v.begin(), v.end()));
    double a = uniform01(rng), b = uniform01(rng);
    if (a > b) std::swap(a, b);
    CHECK(percentile(v, a) <= percentile(v, b));
  }
}
