#include "cwh/synth.hpp"

#include "cwh/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace cwh::synth {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Distribution transforms are written out so that draws do not depend on the
// standard library's unspecified distribution algorithms.
class Stream
{
public:
  Stream(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ (stream * 0xD1B54A32D192ED03ULL)))
  {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

  double normal()
  {
    double u1 = 1.0 - uniform(); // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::size_t index(std::size_t n) { return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n))); }

private:
  std::mt19937_64 engine_;
};

void check_probability(double p, const char* what)
{
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValueError(fmt::format("{} must be in [0, 1], got {}", what, p));
  }
}

void check_power(double kw, const char* what)
{
  if (!(kw >= 0.0) || !std::isfinite(kw)) {
    throw ValueError(fmt::format("{} must be a finite non-negative power, got {}", what, kw));
  }
}

} // namespace

void ScenarioConfig::validate() const
{
  if (days <= 0) {
    throw ValueError("scenario needs at least one day");
  }
  if (step.count() <= 0 || minutes_per_day % step.count() != 0) {
    throw ValueError(fmt::format("step of {} min does not divide a day", step.count()));
  }
  check_power(background.base_kw, "background base");
  check_power(background.diurnal_amplitude_kw, "diurnal amplitude");
  check_power(background.noise_kw, "noise scale");
  if (cwh) {
    check_power(cwh->power_kw, "water heater power");
    check_probability(cwh->skip_probability, "skip probability");
    check_probability(cwh->morning_reactivation_probability, "morning reactivation probability");
    if (!(cwh->mean_duration > 0.0) || cwh->duration_jitter < 0.0) {
      throw ValueError("water heater duration must be positive");
    }
  }
  for (const auto& c : confounders) {
    check_power(c.power_kw, "confounder power");
    if (!(c.rate_per_day >= 0.0) || !(c.duration_intervals > 0.0)) {
      throw ValueError("confounder rate must be non-negative and duration positive");
    }
  }
}

double SyntheticHousehold::cwh_share() const
{
  double total = background_kwh + confounder_kwh + cwh_kwh;
  return total > 0.0 ? cwh_kwh / total : 0.0;
}

SyntheticHousehold generate(const ScenarioConfig& config)
{
  config.validate();
  const auto tz = TimeZone::locate(config.zone);
  const auto schedule = OffPeakSchedule::from_ranges(config.offpeak, Minutes{ 30 });
  const auto start = parse_timestamp(config.start, tz);
  const auto step = config.step;
  const auto per_day = static_cast<std::size_t>(minutes_per_day / step.count());
  const auto n = per_day * static_cast<std::size_t>(config.days);
  const double step_h = static_cast<double>(step.count()) / 60.0;

  std::vector<int> minute(n);
  for (std::size_t i = 0; i < n; ++i) {
    minute[i] = local_minute_of_day(start + step * static_cast<long>(i), tz);
  }

  SyntheticHousehold out;
  std::vector<double> background(n, 0.0);
  std::vector<double> confounder(n, 0.0);
  std::vector<double> heater(n, 0.0);

  Stream bg_rng(config.seed, 1);
  const auto& bg = config.background;
  for (std::size_t i = 0; i < n; ++i) {
    double hour = minute[i] / 60.0;
    double diurnal = bg.diurnal_amplitude_kw * std::cos(2.0 * std::numbers::pi * (hour - 19.0) / 24.0);
    double noise = bg.noise_kw * std::abs(bg_rng.normal());
    background[i] = std::max(0.0, bg.base_kw + diurnal + noise);
  }

  if (config.cwh) {
    const auto& wh = *config.cwh;
    Stream rng(config.seed, 2);
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& iv : schedule.intervals()) {
        if (minute[i] != iv.start.count()) {
          continue;
        }
        bool skip = rng.bernoulli(wh.skip_probability);
        double jitter = rng.uniform(-wh.duration_jitter, wh.duration_jitter);
        bool reactivate = rng.bernoulli(wh.morning_reactivation_probability);
        if (skip) {
          ++out.skipped;
          continue;
        }
        const auto window = static_cast<std::size_t>(iv.duration / step);
        double d = std::clamp(wh.mean_duration + jitter, 1.0, static_cast<double>(window));
        if (wh.whole_intervals) {
          d = std::round(d);
        }
        auto full = static_cast<std::size_t>(std::floor(d));
        double frac = d - static_cast<double>(full);
        for (std::size_t k = 0; k < full && i + k < n; ++k) {
          heater[i + k] = wh.power_kw;
        }
        std::size_t occupied = full;
        if (frac > 1e-9 && full < window) {
          if (i + full < n) {
            heater[i + full] = frac * wh.power_kw;
          }
          ++occupied;
        }
        ++out.triggered;

        int end_minute = static_cast<int>(iv.end().count()) % minutes_per_day;
        bool morning = end_minute >= 4 * 60 && end_minute <= 10 * 60;
        if (morning && reactivate) {
          std::size_t r = i + window - 1;
          if (r >= i + occupied + 1 && r < n) {
            heater[r] = wh.power_kw;
            ++out.reactivations;
          }
        }
      }
    }
  }

  for (std::size_t c = 0; c < config.confounders.size(); ++c) {
    const auto& conf = config.confounders[c];
    Stream rng(config.seed, 3 + c);
    const double starts = static_cast<double>(schedule.intervals().size());
    for (std::size_t i = 0; i < n; ++i) {
      bool fire = false;
      if (conf.alignment == Alignment::random) {
        fire = rng.bernoulli(conf.rate_per_day / static_cast<double>(per_day));
      } else {
        bool at_start = std::any_of(schedule.intervals().begin(), schedule.intervals().end(), [&](const auto& iv) {
          return minute[i] == iv.start.count();
        });
        fire = at_start && rng.bernoulli(std::min(1.0, conf.rate_per_day / starts));
      }
      if (!fire) {
        continue;
      }
      auto len = static_cast<std::size_t>(
        std::max(1.0, std::round(conf.duration_intervals * rng.uniform(0.5, 1.5))));
      for (std::size_t k = 0; k < len && i + k < n; ++k) {
        confounder[i + k] += conf.power_kw;
      }
    }
  }

  out.curve.household_id = config.household_id;
  out.curve.start = start;
  out.curve.step = step;
  out.curve.tz = tz;
  out.curve.values.resize(n);
  out.truth.start = start;
  out.truth.step = step;
  out.truth.cwh_power = heater;
  for (std::size_t i = 0; i < n; ++i) {
    out.curve.values[i] = background[i] + confounder[i] + heater[i];
    out.background_kwh += background[i] * step_h;
    out.confounder_kwh += confounder[i] * step_h;
    out.cwh_kwh += heater[i] * step_h;
  }

  out.metadata.id = config.household_id;
  out.metadata.schedule = schedule;
  out.metadata.water_heating_type =
    config.water_heating_type.value_or(config.cwh ? std::string("elec") : std::string("gas"));
  out.metadata.offpeak_pricing = true;
  return out;
}

LoadCurve anonymize(const LoadCurve& curve, std::uint64_t seed)
{
  LoadCurve out = curve;
  Stream rng(seed, 0xA11);
  for (auto& v : out.values) {
    if (v) {
      *v += rng.exponential(anonymization_noise_mean_kw);
    }
  }
  return out;
}

// --- scenario files ------------------------------------------------------------

using nlohmann::json;

namespace {

template<typename T>
void read_opt(const json& j, const char* key, T& dst)
{
  if (auto it = j.find(key); it != j.end() && !it->is_null()) {
    try {
      dst = it->get<T>();
    } catch (const json::exception& e) {
      throw SchemaError(fmt::format("scenario field '{}': {}", key, e.what()));
    }
  }
}

} // namespace

ScenarioConfig parse_scenario(std::string_view json_text)
{
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(fmt::format("scenario is not valid JSON: {}", e.what()));
  }
  if (!j.is_object()) {
    throw SchemaError("scenario must be a JSON object");
  }
  ScenarioConfig c;
  read_opt(j, "household_id", c.household_id);
  read_opt(j, "days", c.days);
  int step = static_cast<int>(c.step.count());
  read_opt(j, "step_min", step);
  c.step = Minutes{ step };
  read_opt(j, "start", c.start);
  read_opt(j, "zone", c.zone);
  read_opt(j, "offpeak", c.offpeak);
  read_opt(j, "seed", c.seed);
  if (auto it = j.find("water_heating_type"); it != j.end() && it->is_string()) {
    c.water_heating_type = it->get<std::string>();
  }
  if (auto it = j.find("background"); it != j.end()) {
    read_opt(*it, "base_kw", c.background.base_kw);
    read_opt(*it, "diurnal_amplitude_kw", c.background.diurnal_amplitude_kw);
    read_opt(*it, "noise_kw", c.background.noise_kw);
  }
  if (auto it = j.find("cwh"); it != j.end() && !it->is_null()) {
    WaterHeaterModel wh;
    read_opt(*it, "power_kw", wh.power_kw);
    read_opt(*it, "mean_duration", wh.mean_duration);
    read_opt(*it, "duration_jitter", wh.duration_jitter);
    read_opt(*it, "whole_intervals", wh.whole_intervals);
    read_opt(*it, "skip_probability", wh.skip_probability);
    read_opt(*it, "morning_reactivation_probability", wh.morning_reactivation_probability);
    c.cwh = wh;
  }
  if (auto it = j.find("confounders"); it != j.end()) {
    if (!it->is_array()) {
      throw SchemaError("'confounders' must be a list");
    }
    for (const auto& cj : *it) {
      Confounder conf;
      read_opt(cj, "power_kw", conf.power_kw);
      read_opt(cj, "rate_per_day", conf.rate_per_day);
      read_opt(cj, "duration_intervals", conf.duration_intervals);
      std::string alignment = "random";
      read_opt(cj, "alignment", alignment);
      if (alignment == "random") {
        conf.alignment = Alignment::random;
      } else if (alignment == "offpeak_start") {
        conf.alignment = Alignment::offpeak_start;
      } else {
        throw SchemaError(fmt::format("unknown confounder alignment '{}'", alignment));
      }
      c.confounders.push_back(conf);
    }
  }
  c.validate();
  return c;
}

std::string format_scenario(const ScenarioConfig& c)
{
  json j;
  j["household_id"] = c.household_id;
  j["days"] = c.days;
  j["step_min"] = c.step.count();
  j["start"] = c.start;
  j["zone"] = c.zone;
  j["offpeak"] = c.offpeak;
  j["seed"] = c.seed;
  if (c.water_heating_type) {
    j["water_heating_type"] = *c.water_heating_type;
  }
  j["background"] = { { "base_kw", c.background.base_kw },
                      { "diurnal_amplitude_kw", c.background.diurnal_amplitude_kw },
                      { "noise_kw", c.background.noise_kw } };
  if (c.cwh) {
    j["cwh"] = { { "power_kw", c.cwh->power_kw },
                 { "mean_duration", c.cwh->mean_duration },
                 { "duration_jitter", c.cwh->duration_jitter },
                 { "whole_intervals", c.cwh->whole_intervals },
                 { "skip_probability", c.cwh->skip_probability },
                 { "morning_reactivation_probability", c.cwh->morning_reactivation_probability } };
  } else {
    j["cwh"] = nullptr;
  }
  j["confounders"] = json::array();
  for (const auto& conf : c.confounders) {
    j["confounders"].push_back({ { "power_kw", conf.power_kw },
                                 { "rate_per_day", conf.rate_per_day },
                                 { "duration_intervals", conf.duration_intervals },
                                 { "alignment", conf.alignment == Alignment::random ? "random" : "offpeak_start" } });
  }
  return j.dump(2) + "\n";
}

// --- fleets ----------------------------------------------------------------------

namespace {

using Ranges = std::vector<std::string>;

const std::vector<Ranges>& two_range_pool()
{
  static const std::vector<Ranges> pool{
    { "01:00-07:00", "13:00-15:00" }, { "00:30-06:30", "13:30-15:30" }, { "02:00-07:00", "12:00-15:00" },
    { "23:00-06:00", "14:00-15:00" }, { "22:00-04:00", "12:00-14:00" }, { "01:30-07:30", "12:30-14:30" },
  };
  return pool;
}

const std::vector<Ranges>& one_range_pool()
{
  static const std::vector<Ranges> pool{ { "22:00-06:00" }, { "22:30-06:30" }, { "23:00-07:00" } };
  return pool;
}

const std::vector<Ranges>& three_range_pool()
{
  static const std::vector<Ranges> pool{ { "01:00-06:00", "12:00-14:00", "20:00-21:00" },
                                         { "02:00-07:00", "13:00-15:00", "18:00-19:00" } };
  return pool;
}

} // namespace

ScenarioConfig sample_scenario(std::uint64_t fleet_seed, std::size_t index, bool with_cwh, const FleetOptions& options)
{
  Stream rng(fleet_seed, 0x5EED0000ULL + index);
  ScenarioConfig c;
  c.household_id = fmt::format("h{:04}", index);
  c.days = options.days;
  c.seed = splitmix64(fleet_seed ^ splitmix64(index + 1));

  double u = rng.uniform();
  const auto& pool = u < 0.92 ? two_range_pool() : (u < 0.96 ? one_range_pool() : three_range_pool());
  c.offpeak = pool[rng.index(pool.size())];

  c.background.base_kw = rng.uniform(0.25, 0.6);
  c.background.diurnal_amplitude_kw = rng.uniform(0.05, 0.2);
  c.background.noise_kw = rng.uniform(0.05, 0.12);

  double power = rng.uniform(options.cwh_power_min_kw, options.cwh_power_max_kw);
  double jitter = std::min(1.0, 0.5 * (options.duration_max - options.duration_min));
  double mean = rng.uniform(options.duration_min + jitter, options.duration_max - jitter);
  if (with_cwh) {
    WaterHeaterModel wh;
    wh.power_kw = power;
    wh.mean_duration = mean;
    wh.duration_jitter = jitter;
    wh.whole_intervals = options.whole_intervals;
    wh.skip_probability = options.skip_probability;
    wh.morning_reactivation_probability = options.morning_reactivation_probability;
    c.cwh = wh;
  }

  auto count = 1 + rng.index(static_cast<std::size_t>(std::max(1, options.confounders_max)));
  for (std::size_t k = 0; k < count; ++k) {
    Confounder conf;
    conf.power_kw = rng.uniform(1.0, 3.0);
    conf.rate_per_day = rng.uniform(options.confounder_rate_min, options.confounder_rate_max);
    conf.duration_intervals = rng.uniform(1.0, 3.0);
    conf.alignment = Alignment::random;
    c.confounders.push_back(conf);
  }
  c.water_heating_type = with_cwh ? "elec" : "gas";
  return c;
}

} // namespace cwh::synth
