#include "cwh/detector.hpp"

#include "cwh/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>

namespace cwh {

ObservationThreshold compute_threshold(const Observation& obs, const DetectorConfig& config)
{
  ObservationThreshold out;
  out.observation = obs.index;

  std::vector<double> present;
  present.reserve(obs.values.size());
  for (const auto& v : obs.values) {
    if (v) {
      present.push_back(*v);
    }
  }
  if (present.size() < config.min_present) {
    out.skip_reason = fmt::format("{} present values, need {}", present.size(), config.min_present);
    return out;
  }

  double bandwidth = 0.0;
  try {
    bandwidth = kde::scott_bandwidth(present);
  } catch (const DegenerateSampleError& e) {
    out.skip_reason = e.what();
    return out;
  }
  auto est = kde::evaluate_density(present, bandwidth, config.grid_points);
  auto valley = kde::first_local_minimum(est);
  if (!valley) {
    out.skip_reason = "unimodal power distribution";
    return out;
  }
  auto [lo, hi] = std::minmax_element(present.begin(), present.end());
  if (!(*valley > *lo && *valley < *hi)) {
    out.skip_reason = "valley outside the observed power range";
    return out;
  }
  out.threshold_kw = valley;
  return out;
}

std::vector<Spike> extract_spikes(const Observation& obs,
                                  const ObservationThreshold& threshold,
                                  const OffPeakSchedule& schedule)
{
  std::vector<Spike> spikes;
  if (!threshold.threshold_kw) {
    return spikes;
  }
  const double thr = *threshold.threshold_kw;
  const auto& v = obs.values;
  const auto n = v.size();
  const double step_h = static_cast<double>(obs.step.count()) / 60.0;

  auto above = [&](std::size_t i) { return v[i] && *v[i] > thr; };

  std::size_t i = 0;
  while (i < n) {
    if (!above(i)) {
      ++i;
      continue;
    }
    std::size_t begin = i;
    while (i < n && above(i)) {
      ++i;
    }
    std::size_t end = i; // one past the run

    std::optional<double> left;
    for (std::size_t k = begin; k-- > 0;) {
      if (v[k]) {
        left = *v[k];
        break;
      }
    }
    std::optional<double> right;
    for (std::size_t k = end; k < n; ++k) {
      if (v[k]) {
        right = *v[k];
        break;
      }
    }
    if (!left && !right) {
      continue;
    }
    double background = left && right ? 0.5 * (*left + *right) : (left ? *left : *right);

    double peak = 0.0;
    double energy = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      peak = std::max(peak, *v[k]);
      energy += std::clamp(*v[k] - background, 0.0, *v[k]) * step_h;
    }
    double corrected = peak - background;
    if (!(corrected > 0.0)) {
      continue;
    }

    Spike s;
    s.household_id = obs.household_id;
    s.observation = obs.index;
    s.first_index = obs.first + begin;
    s.start = obs.time_at(begin);
    s.length = end - begin;
    s.step = obs.step;
    s.offset = offset_to_nearest_start(s.start, schedule, obs.tz);
    s.peak_power_kw = corrected;
    s.background_kw = background;
    s.energy_kwh = energy;
    spikes.push_back(std::move(s));
  }
  return spikes;
}

} // namespace cwh
