#include "cwh/disagg.hpp"

#include "cwh/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>

namespace cwh {

double AttributionSeries::energy_kwh() const
{
  const double step_h = static_cast<double>(step.count()) / 60.0;
  double total = 0.0;
  for (double p : cwh_power) {
    total += p * step_h;
  }
  return total;
}

std::vector<Activation> to_activations(const DetectionResult& result)
{
  std::vector<Activation> out;
  if (!result.found) {
    return out;
  }
  for (const auto& s : result.cwh_spikes) {
    Activation a;
    a.start = s.start;
    a.duration = s.duration();
    a.energy_kwh = s.energy_kwh;
    a.mean_power_kw = s.energy_kwh / (static_cast<double>(a.duration.count()) / 60.0);
    a.peak_power_kw = s.peak_power_kw;
    out.push_back(a);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  return out;
}

AttributionSeries attribute(const LoadCurve& curve, const DetectionResult& result)
{
  AttributionSeries attr;
  attr.start = curve.start;
  attr.step = curve.step;
  attr.tz = curve.tz;
  attr.cwh_power.assign(curve.size(), 0.0);
  if (!result.found) {
    return attr;
  }
  for (const auto& s : result.cwh_spikes) {
    for (std::size_t k = s.first_index; k < s.first_index + s.length && k < curve.size(); ++k) {
      if (!curve.values[k]) {
        continue;
      }
      double raw = *curve.values[k];
      attr.cwh_power[k] = std::clamp(raw - s.background_kw, 0.0, raw);
    }
  }
  return attr;
}

ConsumptionFractions consumption_fractions(const LoadCurve& curve, const AttributionSeries& attr)
{
  if (attr.size() != curve.size() || attr.start != curve.start || attr.step != curve.step) {
    throw AlignmentError("attribution series does not match the load curve time base");
  }
  const double step_h = static_cast<double>(curve.step.count()) / 60.0;

  std::map<int, DailyFraction> days; // keyed by days since epoch, so ordered
  ConsumptionFractions out;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (!curve.values[i]) {
      continue;
    }
    auto date = local_date(curve.time_at(i), curve.tz);
    auto key = static_cast<int>(std::chrono::sys_days{ date }.time_since_epoch().count());
    auto& day = days[key];
    day.date = date;
    day.total_kwh += *curve.values[i] * step_h;
    day.cwh_kwh += attr.cwh_power[i] * step_h;
  }
  for (auto& [key, day] : days) {
    if (day.total_kwh > 0.0) {
      day.fraction = std::clamp(day.cwh_kwh / day.total_kwh, 0.0, 1.0);
    }
    out.cwh_kwh += day.cwh_kwh;
    out.total_kwh += day.total_kwh;
    out.daily.push_back(day);
  }
  if (!(out.total_kwh > 0.0)) {
    throw UndefinedFractionError("load curve has zero total energy");
  }
  out.overall = std::clamp(out.cwh_kwh / out.total_kwh, 0.0, 1.0);
  return out;
}

std::string format_attribution(const AttributionSeries& attr)
{
  std::string out = "timestamp,cwh_power_kw\n";
  for (std::size_t i = 0; i < attr.size(); ++i) {
    out += fmt::format("{},{}\n", format_timestamp(attr.time_at(i), attr.tz), format_power(attr.cwh_power[i]));
  }
  return out;
}

std::string format_fractions(const ConsumptionFractions& fractions)
{
  std::string out = "date,daily_fraction,daily_cwh_kwh,daily_total_kwh\n";
  for (const auto& d : fractions.daily) {
    out += fmt::format("{},{},{:.6f},{:.6f}\n",
                       format_date(d.date),
                       d.fraction ? fmt::format("{:.6f}", *d.fraction) : std::string{},
                       d.cwh_kwh,
                       d.total_kwh);
  }
  out += fmt::format("overall,{:.6f},{:.6f},{:.6f}\n", fractions.overall, fractions.cwh_kwh, fractions.total_kwh);
  return out;
}

std::string format_activations(const std::vector<Activation>& activations, const TimeZone& tz)
{
  std::string out = "start,duration_min,mean_power_kw,peak_power_kw,energy_kwh\n";
  for (const auto& a : activations) {
    out += fmt::format("{},{},{:.6f},{:.6f},{:.6f}\n",
                       format_timestamp(a.start, tz),
                       a.duration.count(),
                       a.mean_power_kw,
                       a.peak_power_kw,
                       a.energy_kwh);
  }
  return out;
}

} // namespace cwh
