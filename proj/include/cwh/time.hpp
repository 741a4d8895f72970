#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cwh {

using Instant = std::chrono::sys_seconds;
using LocalTime = std::chrono::local_seconds;
using Minutes = std::chrono::minutes;

inline constexpr std::string_view default_zone_name = "Europe/Paris";

/// A time zone described by a POSIX TZ rule (the footer of a TZif file).
///
/// Only the standard offset plus an optional yearly DST rule is modeled, which
/// covers every zone whose current rules are expressible as a POSIX string.
/// Historical transitions are ignored.
class TimeZone
{
public:
  TimeZone();

  static TimeZone utc();
  static TimeZone fixed(std::chrono::seconds utc_offset);
  static TimeZone from_posix(std::string_view rule, std::string name = {});

  /// Resolves "UTC", a zone id under $TZDIR (default /usr/share/zoneinfo),
  /// or falls back to parsing `name` as a POSIX rule.
  static TimeZone locate(std::string_view name);

  /// Zone named by $CWH_TZ, or Europe/Paris when unset.
  static TimeZone default_zone();

  const std::string& name() const;
  const std::string& posix_rule() const;

  std::chrono::seconds offset_at(Instant t) const;
  LocalTime to_local(Instant t) const;

  /// Instants whose local representation is `lt`: empty in a spring-forward
  /// gap, two entries (earliest first) in a fall-back overlap.
  std::vector<Instant> from_local(LocalTime lt) const;

  bool operator==(const TimeZone& other) const;

private:
  struct Rule;
  explicit TimeZone(std::shared_ptr<const Rule> rule);
  std::shared_ptr<const Rule> rule_;
};

/// Parses `YYYY-MM-DD[T ]HH:MM[:SS[.frac]][Z|(+|-)HH[:MM]]`.
///
/// Timestamps without an offset are read in `tz`. For ambiguous local times
/// the earliest candidate strictly after `after` wins (earliest overall when
/// `after` is empty); local times inside a DST gap are rejected.
Instant parse_timestamp(std::string_view text,
                        const TimeZone& tz,
                        std::optional<Instant> after = std::nullopt);

/// ISO-8601 with an explicit numeric offset, e.g. 2021-10-01T00:00:00+02:00.
std::string format_timestamp(Instant t, const TimeZone& tz);

/// Minutes since local midnight, in [0, 1440).
int local_minute_of_day(Instant t, const TimeZone& tz);

std::chrono::year_month_day local_date(Instant t, const TimeZone& tz);

std::string format_date(std::chrono::year_month_day date);

} // namespace cwh
