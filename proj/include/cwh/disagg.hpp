#pragma once

#include "cwh/classifier.hpp"
#include "cwh/data.hpp"

#include <chrono>
#include <optional>
#include <vector>

namespace cwh {

struct Activation
{
  Instant start{};
  Minutes duration{ 0 };
  double mean_power_kw = 0;
  double peak_power_kw = 0;
  double energy_kwh = 0;

  Instant end() const { return start + duration; }
  bool operator==(const Activation&) const = default;
};

/// Per-interval power attributed to the water heater, on the curve's time base.
struct AttributionSeries
{
  Instant start{};
  Minutes step{ 30 };
  TimeZone tz = TimeZone::utc();
  std::vector<double> cwh_power;

  std::size_t size() const { return cwh_power.size(); }
  Instant time_at(std::size_t i) const { return start + step * static_cast<long>(i); }
  double energy_kwh() const;
};

struct DailyFraction
{
  std::chrono::year_month_day date;
  std::optional<double> fraction; // empty when the day has no consumption
  double cwh_kwh = 0;
  double total_kwh = 0;
};

struct ConsumptionFractions
{
  std::vector<DailyFraction> daily;
  double overall = 0;
  double cwh_kwh = 0;
  double total_kwh = 0;
};

/// One activation per water-heater spike, in time order.
std::vector<Activation> to_activations(const DetectionResult& result);

/// Raw power minus the spike background inside water-heater spikes, clamped to
/// [0, raw]; zero everywhere else.
AttributionSeries attribute(const LoadCurve& curve, const DetectionResult& result);

/// Attributed over total energy per local civil day and overall. Missing
/// samples count in neither. Throws UndefinedFractionError when the curve has
/// no energy at all.
ConsumptionFractions consumption_fractions(const LoadCurve& curve, const AttributionSeries& attr);

/// `timestamp,cwh_power_kw` rows.
std::string format_attribution(const AttributionSeries& attr);

/// `date,daily_fraction,daily_cwh_kwh,daily_total_kwh` rows plus a trailing
/// `overall` summary row.
std::string format_fractions(const ConsumptionFractions& fractions);

std::string format_activations(const std::vector<Activation>& activations, const TimeZone& tz);

} // namespace cwh
