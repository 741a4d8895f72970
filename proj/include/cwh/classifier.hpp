#pragma once

#include "cwh/data.hpp"
#include "cwh/detector.hpp"
#include "cwh/kde.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace cwh {

struct PowerRange
{
  double low_kw = 0.8;
  double high_kw = 5.0;

  bool operator==(const PowerRange&) const = default;
};

/// Power band attributed to the water heater.
struct PowerCluster
{
  double low_kw = 0;
  double high_kw = 0;
  double mode_kw = 0;
  std::size_t support = 0;

  bool contains(double kw) const { return kw >= low_kw && kw <= high_kw; }
  bool operator==(const PowerCluster&) const = default;
};

struct DetectionConfig
{
  int window_days = 7;
  DetectorConfig detector;
  PowerRange expected;
  std::optional<std::size_t> min_support; // default: see default_min_support()
  Minutes alignment_tolerance{ 0 };
  kde::MinimumStrategy valley_strategy = kde::MinimumStrategy::lowest_density;

  bool operator==(const DetectionConfig&) const = default;
};

struct DetectionResult
{
  std::string household_id;
  Minutes step{ 30 };
  bool found = false;
  std::optional<PowerCluster> cluster;
  std::vector<Spike> cwh_spikes;
  std::vector<Spike> other_spikes;
  std::vector<ObservationThreshold> thresholds;
  std::size_t min_support = 0;

  bool operator==(const DetectionResult&) const = default;
};

/// max(3, one per six days of data).
std::size_t default_min_support(const LoadCurve& curve);

/// Spikes whose start is within `tolerance` of an off-peak start.
std::vector<Spike> filter_aligned(const std::vector<Spike>& spikes, Minutes tolerance = Minutes{ 0 });

/// Second KDE pass over the peak powers of aligned spikes. The deepest valley
/// (or the expected low edge when there is none) bounds the band from below;
/// the expected high edge bounds it from above.
std::optional<PowerCluster> find_power_cluster(const std::vector<Spike>& aligned,
                                               PowerRange expected,
                                               std::size_t min_support,
                                               kde::MinimumStrategy strategy = kde::MinimumStrategy::lowest_density,
                                               std::size_t grid_points = kde::default_grid_points);

DetectionResult classify(const std::vector<Spike>& spikes,
                         const std::optional<PowerCluster>& cluster,
                         Minutes tolerance = Minutes{ 0 });

/// Full pipeline: segment, threshold, extract, filter, cluster, classify.
DetectionResult detect_cwh(const LoadCurve& curve, const OffPeakSchedule& schedule, const DetectionConfig& config = {});

} // namespace cwh
