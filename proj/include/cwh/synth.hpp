#pragma once

#include "cwh/data.hpp"
#include "cwh/evaluate.hpp"
#include "cwh/metadata.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cwh::synth {

inline constexpr double anonymization_noise_mean_kw = 0.005;

struct BackgroundModel
{
  double base_kw = 0.3;
  double diurnal_amplitude_kw = 0.1; // peak at 19:00 local
  double noise_kw = 0.08;            // scale of the folded-normal noise
};

struct WaterHeaterModel
{
  double power_kw = 2.4;
  double mean_duration = 5.0;   // in intervals, may be fractional
  double duration_jitter = 1.0; // uniform +/- jitter, in intervals
  // Round each drawn duration to whole intervals instead of leaving a
  // partially used last interval.
  bool whole_intervals = false;
  double skip_probability = 0.0;
  // Chance, after a trigger in a range ending in the morning, of one extra
  // interval of heating near the end of that range.
  double morning_reactivation_probability = 0.0;
};

enum class Alignment
{
  random,
  offpeak_start
};

struct Confounder
{
  double power_kw = 2.0;
  double rate_per_day = 0.5;
  double duration_intervals = 2.0;
  Alignment alignment = Alignment::random;
};

struct ScenarioConfig
{
  std::string household_id = "synthetic";
  int days = 28;
  Minutes step{ 30 };
  std::string start = "2021-10-01T00:00:00"; // local time in `zone`
  std::string zone{ default_zone_name };
  std::vector<std::string> offpeak{ "22:30-06:30" };
  BackgroundModel background;
  std::optional<WaterHeaterModel> cwh;
  std::vector<Confounder> confounders;
  std::optional<std::string> water_heating_type; // defaults to elec with a heater, gas without
  std::uint64_t seed = 0;

  /// Throws ValueError on negative powers or probabilities outside [0, 1].
  void validate() const;
};

struct SyntheticHousehold
{
  LoadCurve curve;
  GroundTruth truth;
  HouseholdMetadata metadata;
  double background_kwh = 0;
  double confounder_kwh = 0;
  double cwh_kwh = 0;
  std::size_t triggered = 0;
  std::size_t skipped = 0;
  std::size_t reactivations = 0;

  double cwh_share() const;
};

SyntheticHousehold generate(const ScenarioConfig& config);

/// Adds an exponential draw with mean 0.005 kW to every present value.
LoadCurve anonymize(const LoadCurve& curve, std::uint64_t seed);

ScenarioConfig parse_scenario(std::string_view json_text);
std::string format_scenario(const ScenarioConfig& config);

/// Options for drawing many households with varied parameters.
struct FleetOptions
{
  int days = 31;
  double cwh_power_min_kw = 1.0;
  double cwh_power_max_kw = 3.3;
  double duration_min = 2.0; // intervals
  double duration_max = 8.0;
  bool whole_intervals = true;
  double skip_probability = 0.05;
  double morning_reactivation_probability = 0.10;
  double confounder_rate_min = 0.2; // per day, per confounder
  double confounder_rate_max = 0.5;
  int confounders_max = 2;
};

/// Household number `index` of a fleet. Schedules are drawn from a fixed
/// pool: two ranges for 92 % of homes, one range for 4 %, three for 4 %.
ScenarioConfig sample_scenario(std::uint64_t fleet_seed,
                               std::size_t index,
                               bool with_cwh,
                               const FleetOptions& options = {});

} // namespace cwh::synth
