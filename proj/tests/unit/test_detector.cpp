#include "helpers.hpp"

#include "cwh/detector.hpp"
#include "cwh/kde.hpp"
#include "cwh/synth.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace cwh;
using namespace std::chrono;
using testing::make_curve;
using testing::whole;

namespace {

// Uniform(0.1, 0.4) week with a 2.5 kW plateau of three intervals every night at 22:30.
LoadCurve plateau_week(std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> bg(0.1, 0.4);
  std::vector<double> v(7 * 48);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = bg(rng);
    std::size_t slot = i % 48;
    if (slot >= 45 && slot < 48) {
      v[i] = 2.5 + bg(rng) * 0.1;
    }
  }
  return make_curve(v);
}

const OffPeakSchedule& night()
{
  static const auto s = OffPeakSchedule::from_ranges({ "22:30-06:30" });
  return s;
}

} // namespace

TEST_CASE("threshold examples")
{
  auto flat = whole(make_curve(std::vector<double>(336, 0.3)));
  auto none = compute_threshold(flat);
  CHECK_FALSE(none.threshold_kw.has_value());
  CHECK_FALSE(none.skip_reason.empty());

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto obs = whole(plateau_week(seed));
    auto thr = compute_threshold(obs);
    REQUIRE(thr.threshold_kw.has_value());
    CHECK(*thr.threshold_kw > 0.5);
    CHECK(*thr.threshold_kw < 2.2);
  }

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> bg(0.1, 0.4);
  std::vector<double> noise(336);
  for (auto& x : noise) {
    x = bg(rng);
  }
  // Flat noise may still have a shallow wiggle; any threshold found stays inside the data.
  auto nthr = compute_threshold(whole(make_curve(noise)));
  if (nthr.threshold_kw) {
    CHECK(*nthr.threshold_kw > *std::min_element(noise.begin(), noise.end()));
    CHECK(*nthr.threshold_kw < *std::max_element(noise.begin(), noise.end()));
  }

  auto few = whole(make_curve(std::vector<double>(47, 0.3)));
  few.values[3] = 2.0;
  CHECK_FALSE(compute_threshold(few).threshold_kw.has_value());
}

TEST_CASE("threshold is strictly inside the observed range")
{
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto obs = whole(plateau_week(seed));
    auto thr = compute_threshold(obs);
    REQUIRE(thr.threshold_kw.has_value());
    double lo = 1e9;
    double hi = -1e9;
    for (const auto& v : obs.values) {
      lo = std::min(lo, *v);
      hi = std::max(hi, *v);
    }
    CHECK(*thr.threshold_kw > lo);
    CHECK(*thr.threshold_kw < hi);
  }
}

TEST_CASE("spike extraction examples")
{
  // 21:30 .. 01:00 UTC with a run at 22:30.
  auto c = make_curve({ 0.2, 0.2, 2.8, 2.8, 2.8, 0.2, 0.2, 0.2 }, "2021-10-01T21:30:00Z");
  ObservationThreshold thr{ 0, 1.0, {} };
  auto spikes = extract_spikes(whole(c), thr, night());
  REQUIRE(spikes.size() == 1);
  CHECK(spikes[0].length == 3);
  CHECK(spikes[0].offset == minutes(0));
  CHECK(spikes[0].peak_power_kw == doctest::Approx(2.6));
  CHECK(spikes[0].background_kw == doctest::Approx(0.2));
  CHECK(spikes[0].energy_kwh == doctest::Approx(3 * 2.6 * 0.5));
  CHECK(spikes[0].first_index == 2);

  auto edge = make_curve({ 3.0, 3.0, 0.4, 0.2 });
  auto e = extract_spikes(whole(edge), thr, night());
  REQUIRE(e.size() == 1);
  CHECK(e[0].background_kw == doctest::Approx(0.4));

  auto all = make_curve({ 3.0, 3.0, 3.0 });
  CHECK(extract_spikes(whole(all), thr, night()).empty());

  CHECK(extract_spikes(whole(c), ObservationThreshold{}, night()).empty());
}

TEST_CASE("missing values end a run and are skipped for background")
{
  auto c = make_curve({ 0.3, 2.0, 2.0, 0, 2.0, 0.5 });
  c.values[3].reset();
  auto spikes = extract_spikes(whole(c), ObservationThreshold{ 0, 1.0, {} }, night());
  REQUIRE(spikes.size() == 2);
  CHECK(spikes[0].length == 2);
  CHECK(spikes[0].background_kw == doctest::Approx((0.3 + 2.0) / 2));
  CHECK(spikes[1].length == 1);
  CHECK(spikes[1].background_kw == doctest::Approx((2.0 + 0.5) / 2));
}

TEST_CASE("non-positive corrected peaks are dropped")
{
  auto c = make_curve({ 3.0, 1.5, 3.0 });
  auto spikes = extract_spikes(whole(c), ObservationThreshold{ 0, 1.0, {} }, night());
  CHECK(spikes.empty());
}

TEST_CASE("spike invariants on synthetic households")
{
  for (std::uint64_t k = 0; k < 10; ++k) {
    auto sc = synth::sample_scenario(5, k, k % 2 == 0);
    auto h = synth::generate(sc);
    for (const auto& obs : segment(h.curve)) {
      auto thr = compute_threshold(obs);
      auto spikes = extract_spikes(obs, thr, *h.metadata.schedule);
      std::size_t prev_end = 0;
      for (const auto& s : spikes) {
        CHECK(s.length >= 1);
        CHECK(s.peak_power_kw > 0);
        CHECK(s.background_kw >= 0);
        CHECK(s.first_index >= prev_end);
        prev_end = s.first_index + s.length;
        for (std::size_t i = s.first_index; i < prev_end; ++i) {
          CHECK(*h.curve.values[i] > *thr.threshold_kw);
        }
      }
    }
  }
}

TEST_CASE("raising the threshold never grows a spike")
{
  auto obs = whole(plateau_week(4));
  auto base = extract_spikes(obs, ObservationThreshold{ 0, 0.6, {} }, night());
  for (double t = 0.7; t < 2.6; t += 0.1) {
    auto higher = extract_spikes(obs, ObservationThreshold{ 0, t, {} }, night());
    for (const auto& h : higher) {
      bool inside = false;
      for (const auto& b : base) {
        if (h.first_index >= b.first_index && h.first_index + h.length <= b.first_index + b.length) {
          inside = true;
        }
      }
      CHECK(inside);
    }
    base = higher;
  }
}

TEST_CASE("clear plateaus overlap exactly one spike")
{
  synth::ScenarioConfig sc;
  sc.seed = 8;
  sc.background = { 0.3, 0.05, 0.05 };
  synth::WaterHeaterModel wh;
  wh.power_kw = 2.4;
  wh.mean_duration = 4;
  wh.duration_jitter = 1;
  sc.cwh = wh;
  auto h = synth::generate(sc);

  std::vector<Spike> spikes;
  for (const auto& obs : segment(h.curve)) {
    auto found = extract_spikes(obs, compute_threshold(obs), *h.metadata.schedule);
    spikes.insert(spikes.end(), found.begin(), found.end());
  }
  // Segments are cut every seven days, which also cuts a plateau in two.
  auto crosses_cut = [&](const Activation& a) {
    auto first = static_cast<std::size_t>((a.start - h.curve.start) / h.curve.step);
    auto last = first + static_cast<std::size_t>(a.duration / h.curve.step) - 1;
    return first / 336 != last / 336;
  };
  std::size_t checked = 0;
  for (const auto& act : truth_activations(h.truth)) {
    if (act.duration < minutes(60) || crosses_cut(act)) {
      continue;
    }
    ++checked;
    int overlaps = 0;
    for (const auto& s : spikes) {
      if (s.start < act.end() && act.start < s.start + s.duration()) {
        ++overlaps;
      }
    }
    CHECK(overlaps == 1);
  }
  CHECK(checked >= 20);
}
