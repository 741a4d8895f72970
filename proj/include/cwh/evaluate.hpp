#pragma once

#include "cwh/disagg.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace cwh {

inline constexpr double activation_threshold_kw = 0.1;

/// Measured water-heater power, averaged on the meter step.
struct GroundTruth
{
  Instant start{};
  Minutes step{ 30 };
  std::vector<double> cwh_power;

  std::size_t size() const { return cwh_power.size(); }
  Instant time_at(std::size_t i) const { return start + step * static_cast<long>(i); }
  bool operator==(const GroundTruth&) const = default;
};

struct ConfusionMatrix
{
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  // Errors next to a true-positive interval, i.e. at an activation edge.
  std::size_t fp_edge = 0;
  std::size_t fn_edge = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
  std::optional<double> precision() const;
  std::optional<double> recall() const;
};

struct ActivationMatch
{
  std::size_t pred = 0;
  std::size_t truth = 0;
};

struct ActivationMetrics
{
  std::size_t predicted = 0;
  std::size_t actual = 0;
  std::optional<double> precision;
  std::optional<double> recall;
  std::vector<ActivationMatch> matching;
};

/// Positive means strictly above `threshold_kw`, for both series.
ConfusionMatrix interval_confusion(std::span<const double> pred,
                                   std::span<const double> truth,
                                   double threshold_kw = activation_threshold_kw);

ConfusionMatrix interval_confusion(const AttributionSeries& pred,
                                   const GroundTruth& truth,
                                   double threshold_kw = activation_threshold_kw);

/// Maximal runs of intervals strictly above the threshold.
std::vector<Activation> series_activations(Instant start,
                                           Minutes step,
                                           std::span<const double> power,
                                           double threshold_kw = activation_threshold_kw);

std::vector<Activation> truth_activations(const GroundTruth& truth, double threshold_kw = activation_threshold_kw);

/// One-to-one matching on positive temporal overlap: each truth activation,
/// earliest first, takes the earliest overlapping unmatched prediction.
ActivationMetrics activation_metrics(const std::vector<Activation>& pred, const std::vector<Activation>& truth);

/// Reads `timestamp,cwh_power_kw` at the meter step or finer and averages it
/// into the slots of `[start, start + slots * step)`. Slots without samples
/// are zero; samples outside the range are ignored.
GroundTruth parse_ground_truth(std::string_view csv_text,
                               const TimeZone& tz,
                               Instant start,
                               Minutes step,
                               std::size_t slots);

std::string format_ground_truth(const GroundTruth& truth, const TimeZone& tz);

} // namespace cwh
