#include "cwh/io.hpp"

#include "cwh/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

namespace cwh {

using nlohmann::ordered_json;

std::string read_text_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(fmt::format("cannot read '{}'", path.string()));
  }
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_text_file(const std::filesystem::path& path, std::string_view content)
{
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(fmt::format("cannot write '{}'", path.string()));
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw Error(fmt::format("failed writing '{}'", path.string()));
  }
}

namespace {

ordered_json spike_json(const Spike& s, const TimeZone& tz)
{
  ordered_json j;
  j["start"] = format_timestamp(s.start, tz);
  j["length"] = s.length;
  j["offset_min"] = s.offset.count();
  j["peak_power_kw"] = s.peak_power_kw;
  j["background_kw"] = s.background_kw;
  j["energy_kwh"] = s.energy_kwh;
  return j;
}

ordered_json activation_json(const Activation& a, const TimeZone& tz)
{
  ordered_json j;
  j["start"] = format_timestamp(a.start, tz);
  j["duration_min"] = a.duration.count();
  j["mean_power_kw"] = a.mean_power_kw;
  j["peak_power_kw"] = a.peak_power_kw;
  j["energy_kwh"] = a.energy_kwh;
  return j;
}

ordered_json opt_json(const std::optional<double>& v)
{
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

} // namespace

std::string detection_to_json(const DetectionResult& result, const RunInfo& info, const TimeZone& tz)
{
  ordered_json j;
  j["household_id"] = result.household_id;
  j["found"] = result.found;
  if (result.cluster) {
    j["cluster"] = { { "low_kw", result.cluster->low_kw },
                     { "high_kw", result.cluster->high_kw },
                     { "mode_kw", result.cluster->mode_kw },
                     { "support", result.cluster->support } };
  } else {
    j["cluster"] = nullptr;
  }
  const auto& c = info.config;
  j["config"] = { { "expected_range", { c.expected.low_kw, c.expected.high_kw } },
                  { "window_days", c.window_days },
                  { "grid_points", c.detector.grid_points },
                  { "min_present", c.detector.min_present },
                  { "min_support", result.min_support },
                  { "alignment_tolerance_min", c.alignment_tolerance.count() },
                  { "valley", c.valley_strategy == kde::MinimumStrategy::lowest_density ? "deepest" : "first" },
                  { "time_zone", info.time_zone },
                  { "step_min", result.step.count() } };
  ordered_json obs = ordered_json::array();
  for (const auto& t : result.thresholds) {
    obs.push_back({ { "index", t.observation },
                    { "threshold_kw", opt_json(t.threshold_kw) },
                    { "skip_reason", t.skip_reason } });
  }
  j["observations"] = obs;
  ordered_json cwh = ordered_json::array();
  for (const auto& s : result.cwh_spikes) {
    cwh.push_back(spike_json(s, tz));
  }
  j["cwh_spikes"] = cwh;
  ordered_json other = ordered_json::array();
  for (const auto& s : result.other_spikes) {
    other.push_back(spike_json(s, tz));
  }
  j["other_spikes"] = other;
  ordered_json acts = ordered_json::array();
  for (const auto& a : to_activations(result)) {
    acts.push_back(activation_json(a, tz));
  }
  j["activations"] = acts;
  return j.dump(2) + "\n";
}

std::string spikes_to_csv(const DetectionResult& result, const TimeZone& tz)
{
  std::vector<const Spike*> all;
  for (const auto& s : result.cwh_spikes) {
    all.push_back(&s);
  }
  for (const auto& s : result.other_spikes) {
    all.push_back(&s);
  }
  std::sort(all.begin(), all.end(), [](const Spike* a, const Spike* b) { return a->first_index < b->first_index; });
  std::string out = "start,length,offset_min,peak_power_kw,background_kw,energy_kwh\n";
  for (const auto* s : all) {
    out += fmt::format("{},{},{},{:.6f},{:.6f},{:.6f}\n",
                       format_timestamp(s->start, tz),
                       s->length,
                       s->offset.count(),
                       s->peak_power_kw,
                       s->background_kw,
                       s->energy_kwh);
  }
  return out;
}

EvaluationReport evaluate_prediction(const AttributionSeries& pred,
                                     const std::vector<Activation>& predicted_activations,
                                     const GroundTruth& truth,
                                     double threshold_kw)
{
  EvaluationReport r;
  r.intervals = interval_confusion(pred, truth, threshold_kw);
  r.predicted = predicted_activations;
  r.actual = truth_activations(truth, threshold_kw);
  r.activations = activation_metrics(r.predicted, r.actual);
  return r;
}

std::string evaluation_to_json(const EvaluationReport& r, const TimeZone& tz)
{
  ordered_json j;
  const auto& cm = r.intervals;
  j["intervals"] = { { "true_positives", cm.tp },
                     { "true_negatives", cm.tn },
                     { "false_positives", cm.fp },
                     { "false_negatives", cm.fn },
                     { "false_positives_at_edge", cm.fp_edge },
                     { "false_positives_isolated", cm.fp - cm.fp_edge },
                     { "false_negatives_at_edge", cm.fn_edge },
                     { "false_negatives_isolated", cm.fn - cm.fn_edge },
                     { "precision", opt_json(cm.precision()) },
                     { "recall", opt_json(cm.recall()) } };
  const auto& am = r.activations;
  j["activations"] = { { "source", r.prediction_source },
                       { "predicted", am.predicted },
                       { "actual", am.actual },
                       { "matched", am.matching.size() },
                       { "precision", opt_json(am.precision) },
                       { "recall", opt_json(am.recall) } };
  ordered_json pairs = ordered_json::array();
  for (const auto& m : am.matching) {
    const auto& p = r.predicted[m.pred];
    const auto& t = r.actual[m.truth];
    pairs.push_back({ { "predicted_start", format_timestamp(p.start, tz) },
                      { "actual_start", format_timestamp(t.start, tz) },
                      { "predicted_energy_kwh", p.energy_kwh },
                      { "actual_energy_kwh", t.energy_kwh } });
  }
  j["matched_activations"] = pairs;
  std::vector<bool> truth_matched(r.actual.size(), false);
  for (const auto& m : am.matching) {
    truth_matched[m.truth] = true;
  }
  ordered_json missed = ordered_json::array();
  for (std::size_t t = 0; t < r.actual.size(); ++t) {
    if (!truth_matched[t]) {
      missed.push_back(activation_json(r.actual[t], tz));
    }
  }
  j["missed_activations"] = missed;
  return j.dump(2) + "\n";
}

std::string interval_scatter_csv(const AttributionSeries& pred, const GroundTruth& truth)
{
  if (pred.size() != truth.size() || pred.start != truth.start || pred.step != truth.step) {
    throw AlignmentError("prediction and ground truth have different time bases");
  }
  std::string out = "timestamp,predicted_kw,actual_kw\n";
  for (std::size_t i = 0; i < pred.size(); ++i) {
    out += fmt::format("{},{},{}\n",
                       format_timestamp(pred.time_at(i), pred.tz),
                       format_power(pred.cwh_power[i]),
                       format_power(truth.cwh_power[i]));
  }
  return out;
}

} // namespace cwh
