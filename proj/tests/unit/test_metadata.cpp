#include "cwh/error.hpp"
#include "cwh/metadata.hpp"

#include <doctest.h>

using namespace cwh;

TEST_CASE("single household document")
{
  auto m = parse_metadata(R"({"id": "h1", "offpeak": ["22:30-06:30"], "water_heating_type": "elec",
                              "surface_m2": 80.5, "inhabitants": 3, "offpeak_pricing": true})");
  REQUIRE(m.size() == 1);
  CHECK(m[0].id == "h1");
  REQUIRE(m[0].schedule.has_value());
  CHECK(m[0].schedule->to_ranges() == std::vector<std::string>{ "22:30-06:30" });
  CHECK(*m[0].water_heating_type == "elec");
  CHECK(*m[0].surface_m2 == 80.5);
  CHECK(*m[0].inhabitants == 3);
  CHECK(*m[0].offpeak_pricing);
}

TEST_CASE("household list and schedule problems")
{
  auto m = parse_metadata(R"({"households": [
      {"id": "a", "offpeak": ["01:30-07:30", "12:30-14:30"]},
      {"id": "b", "offpeak": ["22:15-06:15"]},
      {"id": "c"},
      {"id": "d", "offpeak": "22:00-06:00"}]})");
  REQUIRE(m.size() == 4);
  CHECK(m[0].schedule->intervals().size() == 2);
  CHECK_FALSE(m[0].water_heating_type.has_value());
  CHECK_FALSE(m[1].schedule.has_value());
  CHECK_FALSE(m[1].schedule_error.empty());
  CHECK(m[2].schedule_error == "off-peak hours unknown");
  CHECK_FALSE(m[3].schedule.has_value());

  auto strict = parse_metadata(R"({"id": "s", "offpeak": ["22:00-04:00"]})", true);
  CHECK_FALSE(strict[0].schedule.has_value());
}

TEST_CASE("structural errors")
{
  CHECK_THROWS_AS(parse_metadata("{"), SchemaError);
  CHECK_THROWS_AS(parse_metadata(R"({"households": 3})"), SchemaError);
  CHECK_THROWS_AS(parse_metadata(R"({"id": 4})"), SchemaError);
  CHECK_THROWS_AS(parse_metadata(R"({"id": "x", "inhabitants": "two"})"), SchemaError);
  CHECK_THROWS_AS(parse_metadata(R"({"id": "x", "offpeak_pricing": "yes"})"), SchemaError);
}

TEST_CASE("metadata round trip")
{
  auto m = parse_metadata(R"({"households": [
      {"id": "a", "offpeak": ["22:30-06:30"], "water_heating_type": "gas", "inhabitants": 2},
      {"id": "b", "offpeak": ["02:00-07:00", "13:00-16:00"], "offpeak_pricing": false}]})");
  auto again = parse_metadata(format_metadata(m));
  REQUIRE(again.size() == 2);
  CHECK(again[0].schedule == m[0].schedule);
  CHECK(again[1].schedule == m[1].schedule);
  CHECK(again[0].water_heating_type == m[0].water_heating_type);
  CHECK(again[0].inhabitants == m[0].inhabitants);
  CHECK(again[1].offpeak_pricing == m[1].offpeak_pricing);
}

TEST_CASE("heating types")
{
  CHECK(is_known_heating_type("elec"));
  CHECK(is_known_heating_type("gas"));
  CHECK(is_known_heating_type("other"));
  CHECK_FALSE(is_known_heating_type("solar"));
}
