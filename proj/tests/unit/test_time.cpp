#include "helpers.hpp"

#include "cwh/error.hpp"
#include "cwh/time.hpp"

#include <doctest.h>

#include <cstdlib>

using namespace cwh;
using namespace std::chrono;
using testing::utc;

TEST_CASE("paris offsets follow the EU rule")
{
  auto paris = TimeZone::locate("Europe/Paris");
  CHECK(paris.offset_at(utc("2021-01-15T12:00:00Z")) == hours(1));
  CHECK(paris.offset_at(utc("2021-07-15T12:00:00Z")) == hours(2));
  // Transitions happen at 01:00 UTC on the last Sundays of March and October.
  CHECK(paris.offset_at(utc("2021-03-28T00:59:59Z")) == hours(1));
  CHECK(paris.offset_at(utc("2021-03-28T01:00:00Z")) == hours(2));
  CHECK(paris.offset_at(utc("2021-10-31T00:59:59Z")) == hours(2));
  CHECK(paris.offset_at(utc("2021-10-31T01:00:00Z")) == hours(1));
}

TEST_CASE("local times in gaps and overlaps")
{
  auto paris = TimeZone::locate("Europe/Paris");
  auto gap = paris.from_local(local_days{ 2021y / March / 28 } + hours(2) + minutes(30));
  CHECK(gap.empty());
  auto overlap = paris.from_local(local_days{ 2021y / October / 31 } + hours(2) + minutes(30));
  REQUIRE(overlap.size() == 2);
  CHECK(overlap[0] == utc("2021-10-31T00:30:00Z"));
  CHECK(overlap[1] == utc("2021-10-31T01:30:00Z"));

  CHECK_THROWS_AS(parse_timestamp("2021-03-28T02:30", paris), SchemaError);
  CHECK(parse_timestamp("2021-10-31T02:30", paris) == utc("2021-10-31T00:30:00Z"));
  CHECK(parse_timestamp("2021-10-31T02:30", paris, utc("2021-10-31T00:30:00Z")) == utc("2021-10-31T01:30:00Z"));
}

TEST_CASE("timestamp parsing forms")
{
  auto paris = TimeZone::locate("Europe/Paris");
  auto expect = utc("2021-10-01T08:30:00Z");
  CHECK(parse_timestamp("2021-10-01T10:30:00+02:00", paris) == expect);
  CHECK(parse_timestamp("2021-10-01 10:30:00+0200", paris) == expect);
  CHECK(parse_timestamp("2021-10-01T08:30Z", paris) == expect);
  CHECK(parse_timestamp("2021-10-01T10:30", paris) == expect);
  CHECK(parse_timestamp("2021-10-01T10:30:00.000", paris) == expect);
  CHECK_THROWS_AS(parse_timestamp("2021-13-01T00:00", paris), SchemaError);
  CHECK_THROWS_AS(parse_timestamp("yesterday", paris), SchemaError);
  CHECK_THROWS_AS(parse_timestamp("2021-10-01T10:30:00+02:00 trailing", paris), SchemaError);
}

TEST_CASE("formatting keeps the local offset")
{
  auto paris = TimeZone::locate("Europe/Paris");
  CHECK(format_timestamp(utc("2021-10-01T08:30:00Z"), paris) == "2021-10-01T10:30:00+02:00");
  CHECK(format_timestamp(utc("2021-12-01T08:30:00Z"), paris) == "2021-12-01T09:30:00+01:00");
  CHECK(format_timestamp(utc("2021-12-01T08:30:00Z"), TimeZone::utc()) == "2021-12-01T08:30:00+00:00");
  CHECK(local_minute_of_day(utc("2021-10-01T22:15:00Z"), paris) == 15);
  CHECK(format_date(local_date(utc("2021-10-01T22:15:00Z"), paris)) == "2021-10-02");
}

TEST_CASE("round trip through format and parse")
{
  auto paris = TimeZone::locate("Europe/Paris");
  auto t = utc("2021-10-30T20:00:00Z");
  for (int i = 0; i < 200; ++i) {
    auto s = format_timestamp(t, paris);
    CHECK(parse_timestamp(s, paris) == t);
    t += minutes(30);
  }
}

TEST_CASE("zone lookup")
{
  CHECK(TimeZone::locate("UTC") == TimeZone::utc());
  auto posix = TimeZone::locate("EST5EDT,M3.2.0,M11.1.0");
  CHECK(posix.offset_at(utc("2021-01-15T12:00:00Z")) == hours(-5));
  CHECK(posix.offset_at(utc("2021-07-15T12:00:00Z")) == hours(-4));
  CHECK(TimeZone::fixed(hours(3)).offset_at(utc("2021-07-15T12:00:00Z")) == hours(3));
  CHECK_THROWS_AS(TimeZone::locate("Not/AZone"), ValueError);
  CHECK_THROWS_AS(TimeZone::locate(""), ValueError);
}

TEST_CASE("default zone comes from the environment")
{
  ::setenv("CWH_TZ", "UTC", 1);
  CHECK(TimeZone::default_zone() == TimeZone::utc());
  ::unsetenv("CWH_TZ");
  CHECK(TimeZone::default_zone().name() == "Europe/Paris");
}
