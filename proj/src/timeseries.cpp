#include "smoothbench/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "smoothbench/error.hpp"

namespace smoothbench {

namespace chr = std::chrono;

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto number = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int v = 0;
    auto sub = text.substr(pos, len);
    auto [ptr, ec] = std::from_chars(sub.data(), sub.data() + sub.size(), v);
    if (ec != std::errc{} || ptr != sub.data() + sub.size()) return std::nullopt;
    return v;
  };
  auto y = number(0, 4), m = number(5, 2), d = number(8, 2);
  if (!y || !m || !d) return std::nullopt;
  chr::year_month_day ymd{chr::year{*y}, chr::month{static_cast<unsigned>(*m)},
                          chr::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  return chr::sys_days{ymd};
}

std::string format_date(Date date) {
  chr::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

TimeSeries::TimeSeries(std::vector<Sample> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw Error(ErrorKind::EmptyInput, "time series needs at least one sample");
  bool any = false;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (i > 0 && samples_[i].date <= samples_[i - 1].date) {
      throw Error(ErrorKind::DuplicateTimestamp,
                  "dates must be strictly increasing at " + format_date(samples_[i].date));
    }
    if (samples_[i].value) {
      if (!std::isfinite(*samples_[i].value)) {
        throw Error(ErrorKind::ParseError, "non-finite value at " + format_date(samples_[i].date));
      }
      any = true;
    }
  }
  if (!any) throw Error(ErrorKind::InsufficientData, "time series has no observed values");
}

TimeSeries TimeSeries::from_values(std::span<const Date> dates, std::span<const double> values) {
  if (dates.size() != values.size()) {
    throw Error(ErrorKind::MisalignedSeries, "dates and values differ in length");
  }
  std::vector<Sample> s(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) s[i] = {dates[i], values[i]};
  return TimeSeries(std::move(s));
}

TimeSeries TimeSeries::from_values(std::span<const double> values) {
  const Date start = chr::sys_days{chr::year{2020} / 1 / 1};
  std::vector<Date> dates(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) dates[i] = start + chr::days{static_cast<int>(i)};
  return from_values(dates, values);
}

std::vector<Date> TimeSeries::dates() const {
  std::vector<Date> out(samples_.size());
  std::transform(samples_.begin(), samples_.end(), out.begin(), [](const Sample& s) { return s.date; });
  return out;
}

std::size_t TimeSeries::observed_count() const {
  return static_cast<std::size_t>(
      std::count_if(samples_.begin(), samples_.end(), [](const Sample& s) { return !s.missing(); }));
}

std::vector<double> TimeSeries::values() const {
  std::vector<double> out(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!samples_[i].value) {
      throw Error(ErrorKind::InsufficientData,
                  "missing value at " + format_date(samples_[i].date) + " (impute first)");
    }
    out[i] = *samples_[i].value;
  }
  return out;
}

TimeSeries TimeSeries::with_values(std::span<const double> values) const {
  if (values.size() != samples_.size()) {
    throw Error(ErrorKind::MisalignedSeries, "replacement values differ in length");
  }
  std::vector<Sample> s = samples_;
  for (std::size_t i = 0; i < s.size(); ++i) s[i].value = values[i];
  return TimeSeries(std::move(s));
}

TimeSeries TimeSeries::with_missing(std::size_t index) const {
  std::vector<Sample> s = samples_;
  s.at(index).value.reset();
  return TimeSeries(std::move(s));
}

TimeSeries TimeSeries::observed_only() const {
  std::vector<Sample> s;
  std::copy_if(samples_.begin(), samples_.end(), std::back_inserter(s),
               [](const Sample& x) { return !x.missing(); });
  return TimeSeries(std::move(s));
}

std::optional<double> SurveillanceRecord::field(RecordField f) const {
  switch (f) {
    case RecordField::Virus: return c_virus;
    case RecordField::Flow: return q_flow;
    case RecordField::Nh4: return c_nh4;
    case RecordField::ActiveCases: return active_cases;
    case RecordField::Incidence: return incidence_7d;
  }
  return std::nullopt;
}

TimeSeries build_series(std::span<const SurveillanceRecord> records, RecordField field) {
  if (records.empty()) throw Error(ErrorKind::EmptyInput, "no records");
  std::vector<const SurveillanceRecord*> sorted;
  for (const auto& r : records) {
    if (r.site != records.front().site) {
      throw Error(ErrorKind::MixedSites, "records mix sites '" + records.front().site + "' and '" +
                                             r.site + "'");
    }
    sorted.push_back(&r);
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](auto* a, auto* b) { return a->date < b->date; });
  std::vector<Sample> samples;
  samples.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0 && sorted[i]->date == sorted[i - 1]->date) {
      throw Error(ErrorKind::DuplicateTimestamp,
                  "two records share date " + format_date(sorted[i]->date));
    }
    samples.push_back({sorted[i]->date, sorted[i]->field(field)});
  }
  return TimeSeries(std::move(samples));
}

TimeSeries impute_linear(const TimeSeries& series) {
  std::vector<std::size_t> known;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!series[i].missing()) known.push_back(i);
  }
  if (known.size() < 2) {
    throw Error(ErrorKind::InsufficientData, "linear imputation needs two observed values");
  }
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < known.front(); ++i) out[i] = *series[known.front()].value;
  for (std::size_t i = known.back(); i < series.size(); ++i) out[i] = *series[known.back()].value;
  for (std::size_t k = 0; k + 1 < known.size(); ++k) {
    const std::size_t a = known[k], b = known[k + 1];
    const double va = *series[a].value, vb = *series[b].value;
    out[a] = va;
    for (std::size_t i = a + 1; i < b; ++i) {
      const double frac = static_cast<double>(i - a) / static_cast<double>(b - a);
      out[i] = va + frac * (vb - va);
    }
  }
  return series.with_values(out);
}

double percentile(std::span<const double> values, double p) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "percentile of an empty sequence");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidParams, "percentile fraction outside [0,1]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double rank = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  if (frac == 0.0) return v[lo];
  return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace smoothbench
