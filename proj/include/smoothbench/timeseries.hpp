#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace smoothbench {

/// Calendar date at day resolution.
using Date = std::chrono::sys_days;

/// Parses a strict ISO-8601 `YYYY-MM-DD` date; returns nullopt on any other form.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date date);

struct Sample {
  Date date;
  std::optional<double> value;  // nullopt marks a missing measurement

  bool missing() const { return !value.has_value(); }
  bool operator==(const Sample&) const = default;
};

/// Ordered samples with strictly increasing dates and at least one observed value.
/// Immutable once constructed.
class TimeSeries {
 public:
  explicit TimeSeries(std::vector<Sample> samples);

  /// Builds a gap-free series from dates and values of equal length.
  static TimeSeries from_values(std::span<const Date> dates, std::span<const double> values);
  /// Builds a gap-free series on consecutive days starting at 2020-01-01.
  static TimeSeries from_values(std::span<const double> values);

  std::size_t size() const { return samples_.size(); }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  std::span<const Sample> samples() const { return samples_; }

  std::vector<Date> dates() const;
  std::size_t observed_count() const;
  bool has_missing() const { return observed_count() != size(); }

  /// All values; throws InsufficientData if any sample is missing.
  std::vector<double> values() const;
  /// Same dates, new gap-free values (length must match).
  TimeSeries with_values(std::span<const double> values) const;
  /// Copy with the sample at `index` marked missing.
  TimeSeries with_missing(std::size_t index) const;
  /// Drops missing samples.
  TimeSeries observed_only() const;

  bool operator==(const TimeSeries&) const = default;

 private:
  std::vector<Sample> samples_;
};

enum class RecordField { Virus, Flow, Nh4, ActiveCases, Incidence };

/// One composite-sample row in internal units: copies/L, L/d, g/L.
struct SurveillanceRecord {
  std::string site;
  Date date;
  std::optional<double> c_virus;
  std::optional<double> q_flow;
  std::optional<double> c_nh4;
  std::optional<double> active_cases;
  std::optional<double> incidence_7d;

  std::optional<double> field(RecordField f) const;
};

/// Series of one record field, sorted by date. Absent values become missing samples.
TimeSeries build_series(std::span<const SurveillanceRecord> records, RecordField field);

/// Linear interpolation of interior gaps by sample index, nearest-value fill at the ends.
TimeSeries impute_linear(const TimeSeries& series);

/// Inclusive linear-interpolated percentile: rank = p (n - 1).
double percentile(std::span<const double> values, double p);

}  // namespace smoothbench
