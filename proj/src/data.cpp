#include "cwh/data.hpp"

#include "cwh/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>

namespace cwh {

std::size_t LoadCurve::present_count() const
{
  return static_cast<std::size_t>(
    std::count_if(values.begin(), values.end(), [](const auto& v) { return v.has_value(); }));
}

double LoadCurve::missing_fraction() const
{
  if (values.empty()) {
    return 0.0;
  }
  return 1.0 - static_cast<double>(present_count()) / static_cast<double>(values.size());
}

double LoadCurve::span_days() const
{
  return static_cast<double>(values.size()) * static_cast<double>(step.count()) / minutes_per_day;
}

void LoadCurve::validate() const
{
  if (step.count() <= 0) {
    throw ValueError("load curve step must be positive");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] && (!std::isfinite(*values[i]) || *values[i] < 0.0)) {
      throw ValueError(fmt::format("invalid power {} at index {}", *values[i], i));
    }
  }
}

// --- OffPeakSchedule -------------------------------------------------------

OffPeakSchedule::OffPeakSchedule(std::vector<OffPeakInterval> intervals, Minutes resolution, bool strict)
  : intervals_(std::move(intervals))
  , resolution_(resolution)
{
  if (resolution_.count() <= 0 || minutes_per_day % resolution_.count() != 0) {
    throw ValueError(fmt::format("invalid schedule resolution {} min", resolution_.count()));
  }
  if (intervals_.empty() || intervals_.size() > 3) {
    throw ValueError(fmt::format("off-peak schedule needs 1 to 3 intervals, got {}", intervals_.size()));
  }
  for (const auto& iv : intervals_) {
    if (iv.start.count() < 0 || iv.start.count() >= minutes_per_day) {
      throw ValueError(fmt::format("off-peak start {} min outside the day", iv.start.count()));
    }
    if (iv.duration.count() <= 0 || iv.duration.count() >= minutes_per_day) {
      throw ValueError(fmt::format("invalid off-peak duration {} min", iv.duration.count()));
    }
    if (iv.start.count() % resolution_.count() != 0 || iv.duration.count() % resolution_.count() != 0) {
      throw ValueError(fmt::format("off-peak interval {}+{} min is not aligned on {} min",
                                   iv.start.count(),
                                   iv.duration.count(),
                                   resolution_.count()));
    }
  }
  std::sort(intervals_.begin(), intervals_.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const auto& cur = intervals_[i];
    auto next_start = i + 1 < intervals_.size() ? intervals_[i + 1].start
                                                : intervals_.front().start + Minutes{ minutes_per_day };
    if (cur.end() > next_start) {
      throw ValueError("off-peak intervals overlap");
    }
  }
  if (strict && !is_eight_hours()) {
    throw ValueError(fmt::format("off-peak hours total {} min, expected 480", total_duration().count()));
  }
}

namespace {

int parse_clock(std::string_view text)
{
  auto bad = [&] { return ValueError(fmt::format("invalid time of day '{}'", text)); };
  if (text.size() != 5 || text[2] != ':') {
    throw bad();
  }
  int h = 0;
  int m = 0;
  auto r1 = std::from_chars(text.data(), text.data() + 2, h);
  auto r2 = std::from_chars(text.data() + 3, text.data() + 5, m);
  if (r1.ec != std::errc{} || r1.ptr != text.data() + 2 || r2.ec != std::errc{} || r2.ptr != text.data() + 5) {
    throw bad();
  }
  if (m > 59 || h > 24 || (h == 24 && m != 0)) {
    throw bad();
  }
  return h * 60 + m;
}

std::string format_clock(int minute)
{
  minute = ((minute % minutes_per_day) + minutes_per_day) % minutes_per_day;
  return fmt::format("{:02}:{:02}", minute / 60, minute % 60);
}

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

} // namespace

OffPeakSchedule OffPeakSchedule::from_ranges(const std::vector<std::string>& ranges, Minutes resolution, bool strict)
{
  std::vector<OffPeakInterval> intervals;
  intervals.reserve(ranges.size());
  for (const auto& raw : ranges) {
    auto range = trim(raw);
    auto dash = range.find('-');
    if (dash == std::string_view::npos) {
      throw ValueError(fmt::format("invalid off-peak range '{}'", raw));
    }
    int begin = parse_clock(trim(range.substr(0, dash)));
    int end = parse_clock(trim(range.substr(dash + 1)));
    if (begin == minutes_per_day) {
      begin = 0;
    }
    int duration = ((end - begin) % minutes_per_day + minutes_per_day) % minutes_per_day;
    if (duration == 0) {
      throw ValueError(fmt::format("empty off-peak range '{}'", raw));
    }
    intervals.push_back({ Minutes{ begin }, Minutes{ duration } });
  }
  return OffPeakSchedule(std::move(intervals), resolution, strict);
}

Minutes OffPeakSchedule::total_duration() const
{
  Minutes total{ 0 };
  for (const auto& iv : intervals_) {
    total += iv.duration;
  }
  return total;
}

std::vector<Minutes> OffPeakSchedule::starts() const
{
  std::vector<Minutes> out;
  out.reserve(intervals_.size());
  for (const auto& iv : intervals_) {
    out.push_back(iv.start);
  }
  return out;
}

bool OffPeakSchedule::contains(int minute_of_day) const
{
  for (const auto& iv : intervals_) {
    int rel = ((minute_of_day - static_cast<int>(iv.start.count())) % minutes_per_day + minutes_per_day) %
              minutes_per_day;
    if (rel < iv.duration.count()) {
      return true;
    }
  }
  return false;
}

std::vector<std::string> OffPeakSchedule::to_ranges() const
{
  std::vector<std::string> out;
  for (const auto& iv : intervals_) {
    out.push_back(format_clock(static_cast<int>(iv.start.count())) + "-" +
                  format_clock(static_cast<int>(iv.end().count())));
  }
  return out;
}

std::vector<std::pair<int, int>> OffPeakSchedule::split_at_midnight() const
{
  std::vector<std::pair<int, int>> out;
  for (const auto& iv : intervals_) {
    int begin = static_cast<int>(iv.start.count());
    int end = static_cast<int>(iv.end().count());
    if (end <= minutes_per_day) {
      out.emplace_back(begin, end);
    } else {
      out.emplace_back(begin, minutes_per_day);
      out.emplace_back(0, end - minutes_per_day);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// --- CSV ---------------------------------------------------------------------

namespace {

std::vector<std::string_view> split_lines(std::string_view text)
{
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    lines.push_back(line);
    if (nl == std::string_view::npos) {
      break;
    }
    pos = nl + 1;
  }
  return lines;
}

std::optional<double> parse_power(std::string_view field, std::size_t line_no)
{
  field = trim(field);
  if (field.empty()) {
    return std::nullopt;
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw SchemaError(fmt::format("line {}: unparseable power '{}'", line_no, field));
  }
  if (!std::isfinite(value)) {
    throw ValueError(fmt::format("line {}: non-finite power", line_no));
  }
  if (value < 0.0) {
    throw ValueError(fmt::format("line {}: negative power {}", line_no, value));
  }
  return value;
}

} // namespace

LoadCurve parse_load_curve(std::string_view csv_text, const TimeZone& tz, Minutes step, std::string household_id)
{
  if (step.count() <= 0) {
    throw ValueError("step must be positive");
  }
  if (csv_text.substr(0, 3) == "\xEF\xBB\xBF") {
    csv_text.remove_prefix(3);
  }
  auto lines = split_lines(csv_text);
  std::size_t i = 0;
  while (i < lines.size() && trim(lines[i]).empty()) {
    ++i;
  }
  if (i == lines.size() || trim(lines[i]) != "timestamp,power_kw") {
    throw SchemaError("expected header 'timestamp,power_kw'");
  }
  ++i;

  LoadCurve curve;
  curve.household_id = std::move(household_id);
  curve.step = step;
  curve.tz = tz;
  const auto step_s = std::chrono::duration_cast<std::chrono::seconds>(step);
  std::optional<Instant> last;

  for (; i < lines.size(); ++i) {
    auto line = trim(lines[i]);
    if (line.empty()) {
      continue;
    }
    auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      throw SchemaError(fmt::format("line {}: expected two fields", i + 1));
    }
    auto t = parse_timestamp(trim(line.substr(0, comma)), tz, last);
    auto power = parse_power(line.substr(comma + 1), i + 1);

    if (!last) {
      curve.start = t;
      curve.values.push_back(power);
      last = t;
      continue;
    }
    if (t == *last) {
      throw SchemaError(fmt::format("line {}: duplicate timestamp", i + 1));
    }
    if (t < *last) {
      throw SchemaError(fmt::format("line {}: timestamps are not increasing", i + 1));
    }
    auto since_start = t - curve.start;
    if (since_start % step_s != std::chrono::seconds{ 0 }) {
      throw SchemaError(fmt::format("line {}: timestamp is off the {} min grid", i + 1, step.count()));
    }
    auto slot = static_cast<std::size_t>(since_start / step_s);
    curve.values.resize(slot, std::nullopt);
    curve.values.push_back(power);
    last = t;
  }
  return curve;
}

std::string format_power(double kw)
{
  return fmt::format("{}", kw);
}

std::string format_load_curve(const LoadCurve& curve)
{
  std::string out = "timestamp,power_kw\n";
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    out += format_timestamp(curve.time_at(i), curve.tz);
    out += ',';
    if (curve.values[i]) {
      out += format_power(*curve.values[i]);
    }
    out += '\n';
  }
  return out;
}

// --- windowing -----------------------------------------------------------------

std::vector<Observation> segment(const LoadCurve& curve, int window_days)
{
  if (curve.empty()) {
    throw EmptyInputError("cannot segment an empty load curve");
  }
  if (window_days <= 0) {
    throw ValueError("window must be at least one day");
  }
  const auto per_day = static_cast<std::size_t>(std::max<long>(1, minutes_per_day / curve.step.count()));
  const auto per_window = per_day * static_cast<std::size_t>(window_days);
  const auto n = curve.size();

  std::vector<std::pair<std::size_t, std::size_t>> bounds;
  std::size_t full = n / per_window;
  std::size_t rem = n % per_window;
  if (full == 0) {
    bounds.emplace_back(0, n);
  } else {
    for (std::size_t w = 0; w < full; ++w) {
      bounds.emplace_back(w * per_window, per_window);
    }
    if (rem >= per_day) {
      bounds.emplace_back(full * per_window, rem);
    } else {
      bounds.back().second += rem;
    }
  }

  std::vector<Observation> out;
  out.reserve(bounds.size());
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    auto [first, count] = bounds[k];
    Observation obs;
    obs.household_id = curve.household_id;
    obs.index = k;
    obs.first = first;
    obs.start = curve.time_at(first);
    obs.step = curve.step;
    obs.tz = curve.tz;
    obs.values.assign(curve.values.begin() + static_cast<long>(first),
                      curve.values.begin() + static_cast<long>(first + count));
    out.push_back(std::move(obs));
  }
  return out;
}

Minutes offset_to_nearest_start(int minute_of_day, const OffPeakSchedule& schedule)
{
  if (schedule.empty()) {
    throw ValueError("empty off-peak schedule");
  }
  std::optional<int> best;
  for (auto start : schedule.starts()) {
    for (int day = -1; day <= 1; ++day) {
      int delta = minute_of_day - (static_cast<int>(start.count()) + day * minutes_per_day);
      if (!best || std::abs(delta) < std::abs(*best) || (std::abs(delta) == std::abs(*best) && delta > *best)) {
        best = delta;
      }
    }
  }
  return Minutes{ *best };
}

Minutes offset_to_nearest_start(Instant t, const OffPeakSchedule& schedule, const TimeZone& tz)
{
  return offset_to_nearest_start(local_minute_of_day(t, tz), schedule);
}

} // namespace cwh
