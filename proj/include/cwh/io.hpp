#pragma once

#include "cwh/classifier.hpp"
#include "cwh/disagg.hpp"
#include "cwh/evaluate.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cwh {

std::string read_text_file(const std::filesystem::path& path);

/// Creates parent directories as needed.
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Echo of the settings a detection ran with, stored next to its result.
struct RunInfo
{
  DetectionConfig config;
  std::string time_zone;
};

/// Detection result document:
///
///     {"household_id", "found", "cluster": {low_kw, high_kw, mode_kw, support} | null,
///      "config": {...}, "observations": [{index, threshold_kw, skip_reason}],
///      "cwh_spikes": [...], "other_spikes": [...], "activations": [...]}
///
/// Spikes carry start, length, offset_min, peak_power_kw, background_kw and
/// energy_kwh; activations carry start, duration_min, mean_power_kw,
/// peak_power_kw and energy_kwh.
std::string detection_to_json(const DetectionResult& result, const RunInfo& info, const TimeZone& tz);

/// `start,length,offset_min,peak_power_kw,background_kw,energy_kwh`, every
/// spike of the household in time order.
std::string spikes_to_csv(const DetectionResult& result, const TimeZone& tz);

struct EvaluationReport
{
  ConfusionMatrix intervals;
  ActivationMetrics activations;
  std::vector<Activation> predicted;
  std::vector<Activation> actual;
  std::string prediction_source; // "detection" or "series"
};

EvaluationReport evaluate_prediction(const AttributionSeries& pred,
                                     const std::vector<Activation>& predicted_activations,
                                     const GroundTruth& truth,
                                     double threshold_kw = activation_threshold_kw);

std::string evaluation_to_json(const EvaluationReport& report, const TimeZone& tz);

/// Predicted against measured power, one row per interval.
std::string interval_scatter_csv(const AttributionSeries& pred, const GroundTruth& truth);

} // namespace cwh
