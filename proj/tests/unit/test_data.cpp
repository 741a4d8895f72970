#include "helpers.hpp"

#include "cwh/data.hpp"
#include "cwh/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

using namespace cwh;
using namespace std::chrono;
using testing::make_curve;
using testing::utc;

TEST_CASE("parse minimal curve")
{
  auto c = parse_load_curve("timestamp,power_kw\n"
                            "2021-10-01T00:00:00Z,0.2\n"
                            "2021-10-01T00:30:00Z,0.3\n",
                            TimeZone::utc());
  REQUIRE(c.size() == 2);
  CHECK(*c.values[0] == doctest::Approx(0.2));
  CHECK(*c.values[1] == doctest::Approx(0.3));
  CHECK(c.start == utc("2021-10-01T00:00:00Z"));
  CHECK(c.missing_fraction() == 0.0);
}

TEST_CASE("gaps become missing values")
{
  auto c = parse_load_curve("timestamp,power_kw\n"
                            "2021-10-01T00:00:00Z,0.2\n"
                            "2021-10-01T01:00:00Z,0.3\n",
                            TimeZone::utc());
  REQUIRE(c.size() == 3);
  CHECK_FALSE(c.values[1].has_value());
  CHECK(c.present_count() == 2);
  CHECK(c.missing_fraction() == doctest::Approx(1.0 / 3.0));

  auto empty_field = parse_load_curve("timestamp,power_kw\n2021-10-01T00:00:00Z,\n2021-10-01T00:30:00Z,1\n",
                                      TimeZone::utc());
  CHECK_FALSE(empty_field.values[0].has_value());
}

TEST_CASE("bad rows are rejected")
{
  const auto tz = TimeZone::utc();
  CHECK_THROWS_AS(parse_load_curve("timestamp,power_kw\n2021-10-01T00:00:00Z,-0.1\n", tz), ValueError);
  CHECK_THROWS_AS(parse_load_curve("timestamp,power_kw\n2021-10-01T00:00:00Z,nan\n", tz), ValueError);
  CHECK_THROWS_AS(parse_load_curve("time,power\n2021-10-01T00:00:00Z,0.1\n", tz), SchemaError);
  CHECK_THROWS_AS(parse_load_curve("timestamp,power_kw\n2021-10-01T00:00:00Z,abc\n", tz), SchemaError);
  CHECK_THROWS_AS(parse_load_curve("timestamp,power_kw\n"
                                   "2021-10-01T00:30:00Z,0.1\n"
                                   "2021-10-01T00:00:00Z,0.1\n",
                                   tz),
                  SchemaError);
  CHECK_THROWS_AS(parse_load_curve("timestamp,power_kw\n"
                                   "2021-10-01T00:00:00Z,0.1\n"
                                   "2021-10-01T00:00:00Z,0.1\n",
                                   tz),
                  SchemaError);
  CHECK_THROWS_AS(parse_load_curve("timestamp,power_kw\n"
                                   "2021-10-01T00:00:00Z,0.1\n"
                                   "2021-10-01T00:20:00Z,0.1\n",
                                   tz),
                  SchemaError);
}

TEST_CASE("naive timestamps across the autumn change")
{
  auto paris = TimeZone::locate("Europe/Paris");
  std::string csv = "timestamp,power_kw\n";
  for (const char* t : { "2021-10-31T01:30", "2021-10-31T02:00", "2021-10-31T02:30", "2021-10-31T02:00",
                         "2021-10-31T02:30", "2021-10-31T03:00" }) {
    csv += std::string(t) + ",0.5\n";
  }
  auto c = parse_load_curve(csv, paris);
  CHECK(c.size() == 6);
  CHECK(c.present_count() == 6);
}

TEST_CASE("csv round trip")
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> power(0.0, 4.0);
  std::bernoulli_distribution missing(0.05);
  auto paris = TimeZone::locate("Europe/Paris");
  for (int trial = 0; trial < 20; ++trial) {
    LoadCurve c;
    c.household_id = "rt";
    c.tz = paris;
    c.start = utc("2021-10-25T22:00:00Z") + hours(trial);
    for (int i = 0; i < 600; ++i) {
      if (missing(rng) && i > 0 && i < 599) {
        c.values.emplace_back();
      } else {
        c.values.emplace_back(power(rng));
      }
    }
    auto back = parse_load_curve(format_load_curve(c), paris, c.step, c.household_id);
    CHECK(back == c);
  }
}

TEST_CASE("segment lengths")
{
  auto days = [](double d) { return std::vector<double>(static_cast<std::size_t>(d * 48), 0.3); };

  auto four = segment(make_curve(days(28)));
  REQUIRE(four.size() == 4);
  for (const auto& o : four) {
    CHECK(o.size() == 336);
  }

  auto five = segment(make_curve(days(31)));
  REQUIRE(five.size() == 5);
  CHECK(five[4].size() == 144);
  CHECK(five[4].first == 4 * 336);
  CHECK(five[4].start == utc("2021-10-29T00:00:00Z"));

  auto one = segment(make_curve(days(7.5)));
  REQUIRE(one.size() == 1);
  CHECK(one[0].size() == 360);

  CHECK_THROWS_AS(segment(LoadCurve{}), EmptyInputError);
  CHECK_THROWS_AS(segment(make_curve(days(1)), 0), ValueError);
}

TEST_CASE("segments cover the curve in order")
{
  for (std::size_t n : { 1u, 47u, 48u, 335u, 336u, 337u, 383u, 384u, 1000u, 1488u, 2000u }) {
    auto obs = segment(make_curve(std::vector<double>(n, 0.1)));
    std::size_t next = 0;
    for (std::size_t k = 0; k < obs.size(); ++k) {
      CHECK(obs[k].index == k);
      CHECK(obs[k].first == next);
      next += obs[k].size();
    }
    CHECK(next == n);
  }
}

TEST_CASE("schedule parsing and validation")
{
  auto s = OffPeakSchedule::from_ranges({ "22:30-06:30" });
  REQUIRE(s.intervals().size() == 1);
  CHECK(s.intervals()[0].start == minutes(22 * 60 + 30));
  CHECK(s.intervals()[0].duration == minutes(480));
  CHECK(s.is_eight_hours());
  CHECK(s.contains(23 * 60));
  CHECK(s.contains(6 * 60));
  CHECK_FALSE(s.contains(6 * 60 + 30));
  CHECK(s.to_ranges() == std::vector<std::string>{ "22:30-06:30" });
  CHECK(s.split_at_midnight() == std::vector<std::pair<int, int>>{ { 0, 390 }, { 1350, 1440 } });

  auto two = OffPeakSchedule::from_ranges({ "12:30-14:30", "01:30-07:30" }, minutes(30), true);
  CHECK(two.starts() == std::vector<Minutes>{ minutes(90), minutes(750) });

  CHECK_THROWS_AS(OffPeakSchedule::from_ranges({ "22:15-06:15" }), ValueError);
  CHECK_THROWS_AS(OffPeakSchedule::from_ranges({ "22:00-06:00", "05:00-07:00" }), ValueError);
  CHECK_THROWS_AS(OffPeakSchedule::from_ranges({ "22:00-05:00" }, minutes(30), true), ValueError);
  CHECK_THROWS_AS(OffPeakSchedule::from_ranges({}), ValueError);
  CHECK_THROWS_AS(OffPeakSchedule::from_ranges({ "01:00-02:00", "03:00-04:00", "05:00-06:00", "07:00-08:00" }),
                  ValueError);
  CHECK_THROWS_AS(OffPeakSchedule::from_ranges({ "1am-2am" }), ValueError);
  CHECK_THROWS_AS(OffPeakSchedule::from_ranges({ "03:00-03:00" }), ValueError);
}

TEST_CASE("offset examples")
{
  auto single = OffPeakSchedule::from_ranges({ "22:30-06:30" });
  CHECK(offset_to_nearest_start(22 * 60 + 30, single) == minutes(0));
  CHECK(offset_to_nearest_start(23 * 60, single) == minutes(30));
  OffPeakSchedule noon_midnight({ { minutes(0), minutes(360) }, { minutes(720), minutes(120) } }, minutes(15));
  CHECK(offset_to_nearest_start(23 * 60 + 45, noon_midnight) == minutes(-15));
  // Equidistant between 00:00 and 12:00: the past start wins.
  CHECK(offset_to_nearest_start(6 * 60, noon_midnight) == minutes(360));

  auto paris = TimeZone::locate("Europe/Paris");
  CHECK(offset_to_nearest_start(utc("2021-10-01T20:30:00Z"), single, paris) == minutes(0));
  CHECK(offset_to_nearest_start(utc("2021-12-01T21:30:00Z"), single, paris) == minutes(0));
}

namespace {

Minutes offset_oracle(int minute, const OffPeakSchedule& schedule)
{
  std::optional<int> best;
  for (auto s : schedule.starts()) {
    for (int day = -1; day <= 1; ++day) {
      int delta = minute - (static_cast<int>(s.count()) + day * minutes_per_day);
      if (!best || std::abs(delta) < std::abs(*best) || (std::abs(delta) == std::abs(*best) && delta > *best)) {
        best = delta;
      }
    }
  }
  return minutes(*best);
}

int max_gap(const OffPeakSchedule& schedule)
{
  std::vector<int> s;
  for (auto m : schedule.starts()) {
    s.push_back(static_cast<int>(m.count()));
  }
  std::sort(s.begin(), s.end());
  int gap = s.front() + minutes_per_day - s.back();
  for (std::size_t i = 1; i < s.size(); ++i) {
    gap = std::max(gap, s[i] - s[i - 1]);
  }
  return gap;
}

} // namespace

TEST_CASE("offset matches enumeration and stays within half the largest gap")
{
  std::vector<std::vector<std::string>> schedules = {
    { "22:30-06:30" }, { "01:30-07:30", "12:30-14:30" }, { "00:00-06:00", "12:00-14:00" },
    { "23:00-05:00", "13:00-15:00" }, { "02:00-04:00", "10:00-13:00", "20:00-23:00" },
  };
  for (const auto& ranges : schedules) {
    auto sched = OffPeakSchedule::from_ranges(ranges);
    int bound = max_gap(sched) / 2;
    for (int m = 0; m < minutes_per_day; ++m) {
      auto got = offset_to_nearest_start(m, sched);
      CHECK(got == offset_oracle(m, sched));
      CHECK(std::abs(got.count()) <= bound);
    }
  }
}

TEST_CASE("validate rejects negative and non-finite power")
{
  auto c = make_curve({ 0.1, 0.2 });
  CHECK_NOTHROW(c.validate());
  c.values[1] = -1.0;
  CHECK_THROWS_AS(c.validate(), ValueError);
  c.values[1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(c.validate(), ValueError);
}

TEST_CASE("power formatting is shortest round trip")
{
  CHECK(format_power(0.1) == "0.1");
  CHECK(format_power(2.0) == "2");
  double x = 0.1 + 0.2;
  CHECK(std::stod(format_power(x)) == x);
}
