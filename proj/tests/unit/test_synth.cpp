#include "helpers.hpp"

#include "cwh/error.hpp"
#include "cwh/synth.hpp"

#include <doctest.h>

#include <cmath>

using namespace cwh;
using namespace std::chrono;

namespace {

synth::ScenarioConfig nightly(double power = 2.4)
{
  synth::ScenarioConfig sc;
  sc.seed = 12;
  synth::WaterHeaterModel wh;
  wh.power_kw = power;
  sc.cwh = wh;
  return sc;
}

} // namespace

TEST_CASE("no heater means an all-zero truth")
{
  auto sc = nightly();
  sc.cwh.reset();
  auto h = synth::generate(sc);
  for (double v : h.truth.cwh_power) {
    CHECK(v == 0.0);
  }
  CHECK(*h.metadata.water_heating_type == "gas");
}

TEST_CASE("one activation per night without skips")
{
  auto h = synth::generate(nightly());
  CHECK(h.curve.size() == 28 * 48);
  CHECK(truth_activations(h.truth).size() == 28);
  CHECK(h.triggered == 28);
  CHECK(*h.metadata.water_heating_type == "elec");
}

TEST_CASE("energy is additive")
{
  auto sc = nightly();
  sc.confounders.push_back({ 1.5, 0.5, 2.0, synth::Alignment::random });
  auto h = synth::generate(sc);
  double total = 0;
  for (const auto& v : h.curve.values) {
    total += *v * 0.5;
  }
  CHECK(std::abs(total - (h.background_kwh + h.confounder_kwh + h.cwh_kwh)) < 1e-9);
  double truth = 0;
  for (double v : h.truth.cwh_power) {
    truth += v * 0.5;
  }
  CHECK(truth == doctest::Approx(h.cwh_kwh).epsilon(1e-12));
  CHECK(h.cwh_share() == doctest::Approx(h.cwh_kwh / total));
}

TEST_CASE("plateaus start at off-peak starts unless reactivated")
{
  for (std::uint64_t k = 0; k < 20; ++k) {
    auto sc = synth::sample_scenario(3, k, true);
    auto h = synth::generate(sc);
    std::size_t off = 0;
    for (const auto& a : truth_activations(h.truth)) {
      if (offset_to_nearest_start(a.start, *h.metadata.schedule, h.curve.tz) != minutes(0)) {
        ++off;
        CHECK(a.duration == minutes(30));
      }
    }
    CHECK(off == h.reactivations);
  }
}

TEST_CASE("morning reactivations sit at the end of the window")
{
  auto sc = nightly();
  sc.offpeak = { "22:00-06:00" };
  sc.cwh->morning_reactivation_probability = 1.0;
  sc.cwh->mean_duration = 3;
  sc.cwh->duration_jitter = 0;
  auto h = synth::generate(sc);
  // The last window runs past the end of the curve.
  CHECK(h.reactivations == 27);
  auto acts = truth_activations(h.truth);
  CHECK(acts.size() == 28 + 27);
  CHECK(local_minute_of_day(acts[1].start, h.curve.tz) == 5 * 60 + 30);
}

TEST_CASE("same seed, same output")
{
  auto sc = synth::sample_scenario(8, 4, true);
  auto a = synth::generate(sc);
  auto b = synth::generate(sc);
  CHECK(a.curve == b.curve);
  CHECK(a.truth == b.truth);
  sc.seed += 1;
  CHECK_FALSE(synth::generate(sc).curve == a.curve);
}

TEST_CASE("generated curves survive the csv round trip")
{
  auto h = synth::generate(synth::sample_scenario(2, 1, true));
  CHECK(parse_load_curve(format_load_curve(h.curve), h.curve.tz, h.curve.step, h.curve.household_id) == h.curve);
}

TEST_CASE("anonymizer noise")
{
  LoadCurve c;
  c.tz = TimeZone::utc();
  c.values.assign(100000, 0.4);
  c.values[10].reset();
  auto a = synth::anonymize(c, 1);
  double sum = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!c.values[i]) {
      CHECK_FALSE(a.values[i].has_value());
      continue;
    }
    double d = *a.values[i] - *c.values[i];
    CHECK(d >= 0.0);
    sum += d;
    ++n;
  }
  CHECK(std::abs(sum / static_cast<double>(n) - 0.005) <= 0.0005);
  CHECK(synth::anonymize(c, 1) == a);
  CHECK_FALSE(synth::anonymize(c, 2) == a);
}

TEST_CASE("scenario validation and files")
{
  auto sc = nightly();
  sc.cwh->skip_probability = 1.5;
  CHECK_THROWS_AS(sc.validate(), ValueError);
  sc = nightly(-1.0);
  CHECK_THROWS_AS(sc.validate(), ValueError);

  auto fleet = synth::sample_scenario(5, 7, true);
  auto back = synth::parse_scenario(synth::format_scenario(fleet));
  CHECK(synth::format_scenario(back) == synth::format_scenario(fleet));
  CHECK(synth::generate(back).curve == synth::generate(fleet).curve);

  auto minimal = synth::parse_scenario(R"({"household_id": "m", "days": 3, "cwh": {"power_kw": 2.0}})");
  CHECK(minimal.days == 3);
  REQUIRE(minimal.cwh.has_value());
  CHECK(minimal.cwh->power_kw == 2.0);
  CHECK_THROWS_AS(synth::parse_scenario(R"({"days": "many"})"), SchemaError);
  CHECK_THROWS_AS(synth::parse_scenario("not json"), SchemaError);
}

TEST_CASE("fleet sampling")
{
  synth::FleetOptions opt;
  std::size_t two = 0;
  for (std::size_t k = 0; k < 200; ++k) {
    auto sc = synth::sample_scenario(1, k, true, opt);
    REQUIRE(sc.cwh.has_value());
    CHECK(sc.cwh->power_kw >= opt.cwh_power_min_kw);
    CHECK(sc.cwh->power_kw <= opt.cwh_power_max_kw);
    CHECK(sc.cwh->mean_duration - sc.cwh->duration_jitter >= opt.duration_min - 1e-12);
    CHECK(sc.cwh->mean_duration + sc.cwh->duration_jitter <= opt.duration_max + 1e-12);
    CHECK(sc.days == opt.days);
    auto sched = OffPeakSchedule::from_ranges(sc.offpeak, minutes(30), true);
    two += sched.intervals().size() == 2;
    for (const auto& c : sc.confounders) {
      CHECK(c.alignment == synth::Alignment::random);
    }
  }
  CHECK(two > 160);
  CHECK_FALSE(synth::sample_scenario(1, 0, false).cwh.has_value());
  CHECK(synth::sample_scenario(1, 12, true).household_id == "h0012");
}
