#pragma once

#include "cwh/time.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cwh {

inline constexpr int minutes_per_day = 1440;

/// Average power per metering interval, in kW. Missing samples are kept as
/// empty optionals so that gaps never look like zero consumption.
struct LoadCurve
{
  std::string household_id;
  Instant start{};
  Minutes step{ 30 };
  TimeZone tz = TimeZone::utc();
  std::vector<std::optional<double>> values;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  Instant time_at(std::size_t index) const { return start + step * static_cast<long>(index); }
  Instant end() const { return time_at(values.size()); }

  std::size_t present_count() const;
  double missing_fraction() const;

  /// Span of the curve in days (number of slots times step).
  double span_days() const;

  /// Throws ValueError on negative or non-finite power, or a non-positive step.
  void validate() const;

  bool operator==(const LoadCurve&) const = default;
};

struct OffPeakInterval
{
  Minutes start{ 0 };    // local time of day, [0, 1440)
  Minutes duration{ 0 }; // may run past midnight

  Minutes end() const { return start + duration; }
  bool operator==(const OffPeakInterval&) const = default;
};

/// Daily off-peak ranges. Midnight-wrapping ranges keep a single start so
/// that the trigger time of the range is never lost.
class OffPeakSchedule
{
public:
  OffPeakSchedule() = default;

  /// Validates alignment on `resolution`, 1..3 entries and no overlap on the
  /// 24 h circle. With `strict`, also requires exactly eight hours in total.
  OffPeakSchedule(std::vector<OffPeakInterval> intervals, Minutes resolution = Minutes{ 30 }, bool strict = false);

  /// Parses `HH:MM-HH:MM` strings; `22:30-06:30` wraps past midnight.
  static OffPeakSchedule from_ranges(const std::vector<std::string>& ranges,
                                     Minutes resolution = Minutes{ 30 },
                                     bool strict = false);

  const std::vector<OffPeakInterval>& intervals() const { return intervals_; }
  Minutes resolution() const { return resolution_; }
  bool empty() const { return intervals_.empty(); }
  Minutes total_duration() const;
  bool is_eight_hours() const { return total_duration() == Minutes{ 480 }; }

  std::vector<Minutes> starts() const;
  bool contains(int minute_of_day) const;

  /// `HH:MM-HH:MM` form, one string per interval.
  std::vector<std::string> to_ranges() const;

  /// Non-wrapping [begin, end) minute pairs with begin < end <= 1440; ranges
  /// that cross midnight are split in two.
  std::vector<std::pair<int, int>> split_at_midnight() const;

  bool operator==(const OffPeakSchedule&) const = default;

private:
  std::vector<OffPeakInterval> intervals_;
  Minutes resolution_{ 30 };
};

/// A contiguous slice of a load curve handled independently by the detector.
struct Observation
{
  std::string household_id;
  std::size_t index = 0;
  std::size_t first = 0; // offset of values[0] in the parent curve
  Instant start{};
  Minutes step{ 30 };
  TimeZone tz = TimeZone::utc();
  std::vector<std::optional<double>> values;

  std::size_t size() const { return values.size(); }
  Instant time_at(std::size_t i) const { return start + step * static_cast<long>(i); }
};

/// Parses `timestamp,power_kw` CSV text. Gaps on the `step` grid become
/// missing values; off-grid, duplicate or decreasing timestamps are schema
/// errors and negative power is a value error. An empty power field is read
/// as a missing sample.
LoadCurve parse_load_curve(std::string_view csv_text,
                           const TimeZone& tz,
                           Minutes step = Minutes{ 30 },
                           std::string household_id = {});

/// Inverse of parse_load_curve. Missing values are written as empty fields.
std::string format_load_curve(const LoadCurve& curve);

/// Consecutive windows of `window_days`. A trailing remainder shorter than a
/// day is folded into the previous window.
std::vector<Observation> segment(const LoadCurve& curve, int window_days = 7);

/// `t` minus the nearest off-peak start (looking at the previous, same and
/// next day). Ties go to the start in the past.
Minutes offset_to_nearest_start(Instant t, const OffPeakSchedule& schedule, const TimeZone& tz);

/// Same, from a local minute of day.
Minutes offset_to_nearest_start(int minute_of_day, const OffPeakSchedule& schedule);

std::string format_power(double kw);

} // namespace cwh
