#include "cwh/evaluate.hpp"

#include "cwh/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>

namespace cwh {

std::optional<double> ConfusionMatrix::precision() const
{
  if (tp + fp == 0) {
    return std::nullopt;
  }
  return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

std::optional<double> ConfusionMatrix::recall() const
{
  if (tp + fn == 0) {
    return std::nullopt;
  }
  return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

ConfusionMatrix interval_confusion(std::span<const double> pred, std::span<const double> truth, double threshold_kw)
{
  if (pred.size() != truth.size()) {
    throw AlignmentError(fmt::format("prediction has {} intervals, ground truth {}", pred.size(), truth.size()));
  }
  const auto n = pred.size();
  auto pos_pred = [&](std::size_t i) { return pred[i] > threshold_kw; };
  auto pos_truth = [&](std::size_t i) { return truth[i] > threshold_kw; };
  auto next_to_tp = [&](std::size_t i) {
    return (i > 0 && pos_pred(i - 1) && pos_truth(i - 1)) || (i + 1 < n && pos_pred(i + 1) && pos_truth(i + 1));
  };

  ConfusionMatrix cm;
  for (std::size_t i = 0; i < n; ++i) {
    bool p = pos_pred(i);
    bool t = pos_truth(i);
    if (p && t) {
      ++cm.tp;
    } else if (!p && !t) {
      ++cm.tn;
    } else if (p) {
      ++cm.fp;
      cm.fp_edge += next_to_tp(i) ? 1 : 0;
    } else {
      ++cm.fn;
      cm.fn_edge += next_to_tp(i) ? 1 : 0;
    }
  }
  return cm;
}

ConfusionMatrix interval_confusion(const AttributionSeries& pred, const GroundTruth& truth, double threshold_kw)
{
  if (pred.start != truth.start || pred.step != truth.step) {
    throw AlignmentError("prediction and ground truth have different time bases");
  }
  return interval_confusion(pred.cwh_power, truth.cwh_power, threshold_kw);
}

std::vector<Activation> series_activations(Instant start,
                                           Minutes step,
                                           std::span<const double> power,
                                           double threshold_kw)
{
  std::vector<Activation> out;
  const double step_h = static_cast<double>(step.count()) / 60.0;
  std::size_t i = 0;
  while (i < power.size()) {
    if (!(power[i] > threshold_kw)) {
      ++i;
      continue;
    }
    Activation a;
    a.start = start + step * static_cast<long>(i);
    std::size_t len = 0;
    for (; i < power.size() && power[i] > threshold_kw; ++i, ++len) {
      a.energy_kwh += power[i] * step_h;
      a.peak_power_kw = std::max(a.peak_power_kw, power[i]);
    }
    a.duration = step * static_cast<long>(len);
    a.mean_power_kw = a.energy_kwh / (static_cast<double>(a.duration.count()) / 60.0);
    out.push_back(a);
  }
  return out;
}

std::vector<Activation> truth_activations(const GroundTruth& truth, double threshold_kw)
{
  return series_activations(truth.start, truth.step, truth.cwh_power, threshold_kw);
}

ActivationMetrics activation_metrics(const std::vector<Activation>& pred, const std::vector<Activation>& truth)
{
  ActivationMetrics m;
  m.predicted = pred.size();
  m.actual = truth.size();
  std::vector<bool> used(pred.size(), false);
  for (std::size_t t = 0; t < truth.size(); ++t) {
    for (std::size_t p = 0; p < pred.size(); ++p) {
      if (used[p]) {
        continue;
      }
      auto lo = std::max(pred[p].start, truth[t].start);
      auto hi = std::min(pred[p].end(), truth[t].end());
      if (hi > lo) {
        used[p] = true;
        m.matching.push_back({ p, t });
        break;
      }
    }
  }
  if (m.predicted > 0) {
    m.precision = static_cast<double>(m.matching.size()) / static_cast<double>(m.predicted);
  }
  if (m.actual > 0) {
    m.recall = static_cast<double>(m.matching.size()) / static_cast<double>(m.actual);
  }
  return m;
}

GroundTruth parse_ground_truth(std::string_view csv_text,
                               const TimeZone& tz,
                               Instant start,
                               Minutes step,
                               std::size_t slots)
{
  if (csv_text.substr(0, 3) == "\xEF\xBB\xBF") {
    csv_text.remove_prefix(3);
  }
  GroundTruth truth;
  truth.start = start;
  truth.step = step;
  truth.cwh_power.assign(slots, 0.0);
  std::vector<double> sums(slots, 0.0);
  std::vector<std::size_t> counts(slots, 0);

  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header = false;
  std::optional<Instant> last;
  const auto step_s = std::chrono::duration_cast<std::chrono::seconds>(step);

  while (pos < csv_text.size()) {
    auto nl = csv_text.find('\n', pos);
    auto line = csv_text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? csv_text.size() : nl + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.remove_suffix(1);
    }
    if (line.empty()) {
      continue;
    }
    if (!header) {
      if (line != "timestamp,cwh_power_kw") {
        throw SchemaError("expected header 'timestamp,cwh_power_kw'");
      }
      header = true;
      continue;
    }
    auto comma = line.find(',');
    if (comma == std::string_view::npos) {
      throw SchemaError(fmt::format("line {}: expected two fields", line_no));
    }
    auto t = parse_timestamp(line.substr(0, comma), tz, last);
    if (last && t <= *last) {
      throw SchemaError(fmt::format("line {}: timestamps are not increasing", line_no));
    }
    last = t;
    auto field = line.substr(comma + 1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
      throw SchemaError(fmt::format("line {}: unparseable power '{}'", line_no, field));
    }
    if (!std::isfinite(value) || value < 0.0) {
      throw ValueError(fmt::format("line {}: invalid power {}", line_no, value));
    }
    if (t < start) {
      continue;
    }
    auto slot = static_cast<std::size_t>((t - start) / step_s);
    if (slot >= slots) {
      continue;
    }
    sums[slot] += value;
    ++counts[slot];
  }
  if (!header) {
    throw SchemaError("expected header 'timestamp,cwh_power_kw'");
  }
  for (std::size_t i = 0; i < slots; ++i) {
    if (counts[i] > 0) {
      truth.cwh_power[i] = sums[i] / static_cast<double>(counts[i]);
    }
  }
  return truth;
}

std::string format_ground_truth(const GroundTruth& truth, const TimeZone& tz)
{
  std::string out = "timestamp,cwh_power_kw\n";
  for (std::size_t i = 0; i < truth.size(); ++i) {
    out += fmt::format("{},{}\n", format_timestamp(truth.time_at(i), tz), format_power(truth.cwh_power[i]));
  }
  return out;
}

} // namespace cwh
