#pragma once

#include "cwh/data.hpp"
#include "cwh/kde.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace cwh {

/// A maximal run of above-threshold samples inside one observation.
struct Spike
{
  std::string household_id;
  std::size_t observation = 0;
  std::size_t first_index = 0; // position of the first sample in the parent curve
  Instant start{};
  std::size_t length = 0;
  Minutes step{ 30 };
  Minutes offset{ 0 };      // start minus the nearest off-peak start
  double peak_power_kw = 0; // max in-run power minus background
  double background_kw = 0;
  double energy_kwh = 0;    // sum of clamp(power - background, 0, power) * step

  Minutes duration() const { return step * static_cast<long>(length); }
  bool operator==(const Spike&) const = default;
};

struct ObservationThreshold
{
  std::size_t observation = 0;
  std::optional<double> threshold_kw;
  std::string skip_reason; // set when the observation yields no threshold

  bool operator==(const ObservationThreshold&) const = default;
};

struct DetectorConfig
{
  std::size_t grid_points = kde::default_grid_points;
  std::size_t min_present = 48;
};

/// First valley of the KDE of present power values. Degenerate or unimodal
/// observations get no threshold and a skip reason instead.
ObservationThreshold compute_threshold(const Observation& obs, const DetectorConfig& config = {});

/// Runs of samples strictly above the threshold. Missing samples end a run.
/// Background is the mean of the nearest present sample on each side of the
/// run (one side at the observation edges); runs covering the whole
/// observation, or whose corrected peak is not positive, are dropped.
std::vector<Spike> extract_spikes(const Observation& obs,
                                  const ObservationThreshold& threshold,
                                  const OffPeakSchedule& schedule);

} // namespace cwh
