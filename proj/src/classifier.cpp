#include "cwh/classifier.hpp"

#include "cwh/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace cwh {

std::size_t default_min_support(const LoadCurve& curve)
{
  const double days =
    static_cast<double>(curve.present_count()) * static_cast<double>(curve.step.count()) / minutes_per_day;
  return std::max<std::size_t>(3, static_cast<std::size_t>(std::floor(days / 6.0)));
}

std::vector<Spike> filter_aligned(const std::vector<Spike>& spikes, Minutes tolerance)
{
  std::vector<Spike> out;
  for (const auto& s : spikes) {
    if (std::chrono::abs(s.offset) <= tolerance) {
      out.push_back(s);
    }
  }
  return out;
}

std::optional<PowerCluster> find_power_cluster(const std::vector<Spike>& aligned,
                                               PowerRange expected,
                                               std::size_t min_support,
                                               kde::MinimumStrategy strategy,
                                               std::size_t grid_points)
{
  if (!(expected.low_kw < expected.high_kw)) {
    throw ValueError(fmt::format("expected range {}:{} is empty", expected.low_kw, expected.high_kw));
  }
  if (aligned.empty() || aligned.size() < min_support) {
    return std::nullopt;
  }

  std::vector<double> powers;
  powers.reserve(aligned.size());
  for (const auto& s : aligned) {
    powers.push_back(s.peak_power_kw);
  }

  double low = expected.low_kw;
  std::optional<kde::DensityEstimate> est;
  try {
    est = kde::evaluate_density(powers, kde::scott_bandwidth(powers), grid_points);
    // Only valleys under the main peak split the CWH cluster from weaker
    // spikes; a stray coincident spike above it would otherwise win.
    auto peak = kde::argmax_in(*est, expected.low_kw, expected.high_kw);
    if (auto valley = peak ? kde::lowest_local_minimum_below(*est, *peak, strategy) : std::nullopt) {
      low = std::max(low, *valley);
    }
  } catch (const DegenerateSampleError&) {
    // All aligned spikes share one power level; the expected range alone bounds the band.
  }
  const double high = expected.high_kw;
  if (!(low < high)) {
    return std::nullopt;
  }

  std::vector<double> members;
  for (double p : powers) {
    if (p >= low && p <= high) {
      members.push_back(p);
    }
  }
  if (members.empty() || members.size() < min_support) {
    return std::nullopt;
  }

  std::optional<double> mode;
  if (est) {
    mode = kde::argmax_in(*est, low, high);
  }
  if (!mode) {
    std::sort(members.begin(), members.end());
    mode = members[members.size() / 2];
  }
  if (*mode < expected.low_kw || *mode > expected.high_kw) {
    return std::nullopt;
  }
  if (!(low < *mode && *mode < high)) {
    return std::nullopt;
  }
  return PowerCluster{ low, high, *mode, members.size() };
}

DetectionResult classify(const std::vector<Spike>& spikes, const std::optional<PowerCluster>& cluster, Minutes tolerance)
{
  DetectionResult result;
  if (!spikes.empty()) {
    result.household_id = spikes.front().household_id;
    result.step = spikes.front().step;
  }
  for (const auto& s : spikes) {
    bool cwh = cluster && std::chrono::abs(s.offset) <= tolerance && cluster->contains(s.peak_power_kw);
    (cwh ? result.cwh_spikes : result.other_spikes).push_back(s);
  }
  if (cluster && !result.cwh_spikes.empty()) {
    result.cluster = cluster;
    result.found = true;
  } else {
    result.other_spikes.insert(result.other_spikes.end(), result.cwh_spikes.begin(), result.cwh_spikes.end());
    result.cwh_spikes.clear();
    std::sort(result.other_spikes.begin(), result.other_spikes.end(), [](const auto& a, const auto& b) {
      return a.first_index < b.first_index;
    });
  }
  return result;
}

DetectionResult detect_cwh(const LoadCurve& curve, const OffPeakSchedule& schedule, const DetectionConfig& config)
{
  curve.validate();
  if (schedule.empty()) {
    throw ValueError("off-peak schedule is empty");
  }

  std::vector<ObservationThreshold> thresholds;
  std::vector<Spike> spikes;
  if (!curve.empty()) {
    for (const auto& obs : segment(curve, config.window_days)) {
      auto thr = compute_threshold(obs, config.detector);
      auto found = extract_spikes(obs, thr, schedule);
      spikes.insert(spikes.end(), found.begin(), found.end());
      thresholds.push_back(std::move(thr));
    }
  }

  const auto min_support = config.min_support.value_or(default_min_support(curve));
  auto aligned = filter_aligned(spikes, config.alignment_tolerance);
  auto cluster = find_power_cluster(
    aligned, config.expected, min_support, config.valley_strategy, config.detector.grid_points);

  auto result = classify(spikes, cluster, config.alignment_tolerance);
  result.household_id = curve.household_id;
  result.step = curve.step;
  result.thresholds = std::move(thresholds);
  result.min_support = min_support;
  return result;
}

} // namespace cwh
