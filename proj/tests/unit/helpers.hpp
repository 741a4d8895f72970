#pragma once

#include "cwh/data.hpp"

#include <optional>
#include <string>
#include <vector>

namespace testing {

inline cwh::Instant utc(const char* text)
{
  return cwh::parse_timestamp(text, cwh::TimeZone::utc());
}

inline cwh::LoadCurve make_curve(const std::vector<double>& values,
                                 const char* start = "2021-10-01T00:00:00Z",
                                 cwh::TimeZone tz = cwh::TimeZone::utc())
{
  cwh::LoadCurve c;
  c.household_id = "t";
  c.start = cwh::parse_timestamp(start, tz);
  c.tz = tz;
  for (double v : values) {
    c.values.emplace_back(v);
  }
  return c;
}

inline cwh::Observation whole(const cwh::LoadCurve& c)
{
  cwh::Observation o;
  o.household_id = c.household_id;
  o.start = c.start;
  o.step = c.step;
  o.tz = c.tz;
  o.values = c.values;
  return o;
}

} // namespace testing
