#pragma once

#include "cwh/classifier.hpp"
#include "cwh/disagg.hpp"
#include "cwh/metadata.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cwh {

struct Histogram
{
  double low = 0;
  double bin_width = 1;
  std::vector<std::size_t> counts;

  Histogram() = default;
  Histogram(double lo, double hi, double width);

  /// Values past the last edge go to the last bin, below the first to the first.
  void add(double x);
  double bin_low(std::size_t i) const { return low + bin_width * static_cast<double>(i); }
  std::size_t total() const;
};

struct PowerClass
{
  const char* name;
  double low_kw;
  double high_kw;
};

/// Water-heater classes by rated power.
inline constexpr PowerClass power_classes[] = {
  { "low", 0.6, 1.5 },
  { "medium", 1.5, 2.7 },
  { "high", 2.7, 3.3 },
};

const char* power_class_of(double kw);

struct GroupStats
{
  std::size_t households = 0;
  std::size_t detections = 0;

  std::optional<double> detection_fraction() const;
};

struct HouseholdOutcome
{
  std::string id;
  std::string heating_type; // "unknown" when not reported
  bool found = false;
  std::optional<PowerCluster> cluster;
  std::size_t cwh_spikes = 0;
  std::size_t other_spikes = 0;
  std::optional<double> overall_fraction;
  double cwh_kwh = 0;
  double total_kwh = 0;
  std::vector<DailyFraction> daily;
};

struct SkipRecord
{
  std::string id;
  std::string reason;
};

struct BatchSummary
{
  std::map<std::string, GroupStats> groups;
  Histogram power{ 0.0, 5.0, 0.1 };
  Histogram daily_fraction{ 0.0, 1.0, 0.02 };
  Histogram overall_fraction{ 0.0, 1.0, 0.01 };
  std::optional<double> pooled_overall_fraction;   // sum of CWH energy over sum of energy
  std::optional<double> mean_household_fraction;   // mean of per-household fractions
  std::size_t processed = 0;
  std::size_t skipped = 0;
  std::map<std::string, std::size_t> skip_reasons;

  std::size_t total() const { return processed + skipped; }
};

struct BatchConfig
{
  DetectionConfig detection;
  std::size_t min_samples = 1440;
  bool require_offpeak_pricing = true;
  unsigned workers = 1;
  TimeZone tz = TimeZone::utc();
  Minutes step{ 30 };
};

struct BatchResult
{
  std::vector<HouseholdOutcome> households; // sorted by id
  std::vector<SkipRecord> skipped;          // sorted by id
  BatchSummary summary;
};

/// Reason a household must be left out of a batch run, if any.
std::optional<std::string> eligibility_issue(const LoadCurve& curve,
                                             const HouseholdMetadata& meta,
                                             const BatchConfig& config);

HouseholdOutcome process_household(const LoadCurve& curve,
                                   const HouseholdMetadata& meta,
                                   const DetectionConfig& config);

/// Runs detection on every `<id>.csv` of `dataset_dir` that has metadata.
/// Households are processed by up to `config.workers` threads and merged in
/// id order.
BatchResult run_batch(const std::filesystem::path& dataset_dir,
                      const std::vector<HouseholdMetadata>& metadata,
                      const BatchConfig& config);

BatchSummary summarize(const std::vector<HouseholdOutcome>& households, const std::vector<SkipRecord>& skipped);

std::string summary_to_json(const BatchSummary& summary);
std::string households_to_csv(const std::vector<HouseholdOutcome>& households);
std::string daily_fractions_to_csv(const std::vector<HouseholdOutcome>& households);
std::string skipped_to_csv(const std::vector<SkipRecord>& skipped);

/// Reads back what households_to_csv / daily_fractions_to_csv / skipped_to_csv wrote.
std::vector<HouseholdOutcome> households_from_csv(std::string_view households_csv, std::string_view daily_csv);
std::vector<SkipRecord> skipped_from_csv(std::string_view csv);

// Figure tables.
std::string detection_by_type_csv(const BatchSummary& summary);
std::string power_histogram_csv(const BatchSummary& summary);
std::string fraction_histogram_csv(const Histogram& histogram);

/// Number of households whose off-peak hours include each half hour of the day.
std::string offpeak_distribution_csv(const std::vector<HouseholdMetadata>& metadata);

/// How many households have one, two or three off-peak ranges.
std::string offpeak_range_counts_csv(const std::vector<HouseholdMetadata>& metadata);

} // namespace cwh
