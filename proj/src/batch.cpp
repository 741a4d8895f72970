#include "cwh/batch.hpp"

#include "cwh/error.hpp"
#include "cwh/io.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <set>
#include <thread>

namespace cwh {

Histogram::Histogram(double lo, double hi, double width)
  : low(lo)
  , bin_width(width)
  , counts(static_cast<std::size_t>(std::llround((hi - lo) / width)), 0)
{}

void Histogram::add(double x)
{
  if (counts.empty()) {
    return;
  }
  // Small epsilon so that values sitting on an edge land in the upper bin
  // despite rounding in (x - low) / width.
  double pos = std::floor((x - low) / bin_width + 1e-9);
  auto i = pos < 0 ? std::size_t{ 0 } : std::min(counts.size() - 1, static_cast<std::size_t>(pos));
  ++counts[i];
}

std::size_t Histogram::total() const
{
  std::size_t t = 0;
  for (auto c : counts) {
    t += c;
  }
  return t;
}

const char* power_class_of(double kw)
{
  for (const auto& c : power_classes) {
    if (kw >= c.low_kw && kw < c.high_kw) {
      return c.name;
    }
  }
  if (kw == power_classes[2].high_kw) {
    return power_classes[2].name;
  }
  return "";
}

std::optional<double> GroupStats::detection_fraction() const
{
  if (households == 0) {
    return std::nullopt;
  }
  return static_cast<double>(detections) / static_cast<double>(households);
}

std::optional<std::string> eligibility_issue(const LoadCurve& curve,
                                             const HouseholdMetadata& meta,
                                             const BatchConfig& config)
{
  if (!meta.schedule) {
    return meta.schedule_error.empty() ? std::string("off-peak hours unknown") : meta.schedule_error;
  }
  if (config.require_offpeak_pricing && meta.offpeak_pricing && !*meta.offpeak_pricing) {
    return std::string("no off-peak pricing");
  }
  if (!meta.water_heating_type) {
    return std::string("water heating type missing");
  }
  auto present = curve.present_count();
  if (present < config.min_samples) {
    return fmt::format("{} samples, need {}", present, config.min_samples);
  }
  return std::nullopt;
}

HouseholdOutcome process_household(const LoadCurve& curve, const HouseholdMetadata& meta, const DetectionConfig& config)
{
  if (!meta.schedule) {
    throw ValueError(fmt::format("household {} has no off-peak schedule", meta.id));
  }
  HouseholdOutcome out;
  out.id = curve.household_id.empty() ? meta.id : curve.household_id;
  out.heating_type = meta.water_heating_type.value_or("unknown");

  auto result = detect_cwh(curve, *meta.schedule, config);
  out.found = result.found;
  out.cluster = result.cluster;
  out.cwh_spikes = result.cwh_spikes.size();
  out.other_spikes = result.other_spikes.size();

  auto attr = attribute(curve, result);
  try {
    auto fr = consumption_fractions(curve, attr);
    out.overall_fraction = fr.overall;
    out.cwh_kwh = fr.cwh_kwh;
    out.total_kwh = fr.total_kwh;
    out.daily = std::move(fr.daily);
  } catch (const UndefinedFractionError&) {
    // zero-energy curve: no fractions to report
  }
  return out;
}

BatchResult run_batch(const std::filesystem::path& dataset_dir,
                      const std::vector<HouseholdMetadata>& metadata,
                      const BatchConfig& config)
{
  namespace fs = std::filesystem;
  if (!fs::is_directory(dataset_dir)) {
    throw SchemaError(fmt::format("dataset directory '{}' does not exist", dataset_dir.string()));
  }

  std::map<std::string, fs::path> curves;
  for (const auto& entry : fs::directory_iterator(dataset_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      curves.emplace(entry.path().stem().string(), entry.path());
    }
  }
  std::map<std::string, const HouseholdMetadata*> meta_by_id;
  for (const auto& m : metadata) {
    meta_by_id.emplace(m.id, &m);
  }
  std::set<std::string> ids;
  for (const auto& [id, path] : curves) {
    ids.insert(id);
  }
  for (const auto& [id, m] : meta_by_id) {
    ids.insert(id);
  }
  std::vector<std::string> order(ids.begin(), ids.end());

  struct Slot
  {
    std::optional<HouseholdOutcome> outcome;
    std::optional<SkipRecord> skip;
  };
  std::vector<Slot> slots(order.size());

  auto work = [&](std::size_t k) {
    const auto& id = order[k];
    auto& slot = slots[k];
    auto curve_it = curves.find(id);
    auto meta_it = meta_by_id.find(id);
    if (curve_it == curves.end()) {
      slot.skip = SkipRecord{ id, "no load curve" };
      return;
    }
    if (meta_it == meta_by_id.end()) {
      slot.skip = SkipRecord{ id, "no metadata" };
      return;
    }
    try {
      auto curve = parse_load_curve(read_text_file(curve_it->second), config.tz, config.step, id);
      if (auto issue = eligibility_issue(curve, *meta_it->second, config)) {
        slot.skip = SkipRecord{ id, *issue };
        return;
      }
      slot.outcome = process_household(curve, *meta_it->second, config.detection);
    } catch (const Error& e) {
      slot.skip = SkipRecord{ id, fmt::format("data error: {}", e.what()) };
    }
  };

  const auto workers = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(order.size())));
  if (workers <= 1) {
    for (std::size_t k = 0; k < order.size(); ++k) {
      work(k);
    }
  } else {
    std::atomic<std::size_t> next{ 0 };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < order.size(); k = next++) {
          work(k);
        }
      });
    }
    for (auto& t : pool) {
      t.join();
    }
  }

  BatchResult result;
  for (auto& slot : slots) {
    if (slot.outcome) {
      result.households.push_back(std::move(*slot.outcome));
    } else if (slot.skip) {
      result.skipped.push_back(std::move(*slot.skip));
    }
  }
  result.summary = summarize(result.households, result.skipped);
  return result;
}

namespace {

std::string reason_category(const std::string& reason)
{
  if (reason.rfind("data error", 0) == 0) {
    return "data error";
  }
  // The skip table swaps commas for semicolons.
  if (reason.find(" samples") != std::string::npos && reason.find(" need ") != std::string::npos) {
    return "too few samples";
  }
  for (const char* known : { "no load curve", "no metadata", "water heating type missing", "no off-peak pricing" }) {
    if (reason == known) {
      return reason;
    }
  }
  return "off-peak hours unusable";
}

} // namespace

BatchSummary summarize(const std::vector<HouseholdOutcome>& households, const std::vector<SkipRecord>& skipped)
{
  BatchSummary s;
  s.processed = households.size();
  s.skipped = skipped.size();
  for (const auto& sk : skipped) {
    ++s.skip_reasons[reason_category(sk.reason)];
  }
  double cwh = 0.0;
  double total = 0.0;
  double sum_fraction = 0.0;
  std::size_t with_fraction = 0;
  for (const auto& h : households) {
    auto& g = s.groups[h.heating_type];
    ++g.households;
    if (h.found) {
      ++g.detections;
      s.power.add(h.cluster->mode_kw);
    }
    if (h.overall_fraction) {
      s.overall_fraction.add(*h.overall_fraction);
      sum_fraction += *h.overall_fraction;
      ++with_fraction;
      cwh += h.cwh_kwh;
      total += h.total_kwh;
    }
    for (const auto& d : h.daily) {
      if (d.fraction) {
        s.daily_fraction.add(*d.fraction);
      }
    }
  }
  if (total > 0.0) {
    s.pooled_overall_fraction = cwh / total;
  }
  if (with_fraction > 0) {
    s.mean_household_fraction = sum_fraction / static_cast<double>(with_fraction);
  }
  return s;
}

namespace {

using nlohmann::ordered_json;

ordered_json histogram_json(const Histogram& h)
{
  ordered_json j;
  j["low"] = h.low;
  j["bin_width"] = h.bin_width;
  j["counts"] = h.counts;
  return j;
}

template<typename T>
ordered_json opt_json(const std::optional<T>& v)
{
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::string num(double x)
{
  return fmt::format("{}", x);
}

std::string opt_num(const std::optional<double>& x)
{
  return x ? num(*x) : std::string{};
}

std::vector<std::string_view> split(std::string_view line, char sep = ',')
{
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    auto next = line.find(sep, pos);
    out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) {
      break;
    }
    pos = next + 1;
  }
  return out;
}

std::vector<std::vector<std::string_view>> csv_rows(std::string_view text, std::string_view header)
{
  std::vector<std::vector<std::string_view>> rows;
  bool seen_header = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (line.empty()) {
      continue;
    }
    if (!seen_header) {
      if (line != header) {
        throw SchemaError(fmt::format("expected header '{}'", header));
      }
      seen_header = true;
      continue;
    }
    rows.push_back(split(line));
  }
  return rows;
}

double to_double(std::string_view s)
{
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw SchemaError(fmt::format("bad number '{}'", s));
  }
  return v;
}

std::size_t to_size(std::string_view s)
{
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw SchemaError(fmt::format("bad count '{}'", s));
  }
  return v;
}

std::optional<double> to_opt_double(std::string_view s)
{
  if (s.empty()) {
    return std::nullopt;
  }
  return to_double(s);
}

std::chrono::year_month_day to_date(std::string_view s)
{
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
    throw SchemaError(fmt::format("bad date '{}'", s));
  }
  auto y = static_cast<int>(to_size(s.substr(0, 4)));
  auto m = static_cast<unsigned>(to_size(s.substr(5, 2)));
  auto d = static_cast<unsigned>(to_size(s.substr(8, 2)));
  std::chrono::year_month_day ymd{ std::chrono::year{ y }, std::chrono::month{ m }, std::chrono::day{ d } };
  if (!ymd.ok()) {
    throw SchemaError(fmt::format("bad date '{}'", s));
  }
  return ymd;
}

constexpr std::string_view households_header =
  "id,heating_type,found,mode_kw,low_kw,high_kw,support,cwh_spikes,other_spikes,overall_fraction,cwh_kwh,total_kwh";
constexpr std::string_view daily_header = "id,date,daily_fraction,daily_cwh_kwh,daily_total_kwh";
constexpr std::string_view skipped_header = "id,reason";

} // namespace

std::string summary_to_json(const BatchSummary& s)
{
  ordered_json j;
  j["households_total"] = s.total();
  j["households_processed"] = s.processed;
  j["households_skipped"] = s.skipped;
  ordered_json reasons = ordered_json::object();
  for (const auto& [reason, count] : s.skip_reasons) {
    reasons[reason] = count;
  }
  j["skip_reasons"] = reasons;
  ordered_json groups = ordered_json::object();
  for (const auto& [type, g] : s.groups) {
    groups[type] = { { "households", g.households },
                     { "detections", g.detections },
                     { "detection_fraction", opt_json(g.detection_fraction()) } };
  }
  j["groups"] = groups;
  j["power_histogram_kw"] = histogram_json(s.power);
  ordered_json classes = ordered_json::array();
  for (const auto& c : power_classes) {
    classes.push_back({ { "name", c.name }, { "low_kw", c.low_kw }, { "high_kw", c.high_kw } });
  }
  j["power_classes"] = classes;
  j["daily_fraction_histogram"] = histogram_json(s.daily_fraction);
  j["overall_fraction_histogram"] = histogram_json(s.overall_fraction);
  j["pooled_overall_fraction"] = opt_json(s.pooled_overall_fraction);
  j["mean_household_fraction"] = opt_json(s.mean_household_fraction);
  return j.dump(2) + "\n";
}

std::string households_to_csv(const std::vector<HouseholdOutcome>& households)
{
  std::string out = std::string(households_header) + "\n";
  for (const auto& h : households) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n",
                       h.id,
                       h.heating_type,
                       h.found ? 1 : 0,
                       h.cluster ? num(h.cluster->mode_kw) : "",
                       h.cluster ? num(h.cluster->low_kw) : "",
                       h.cluster ? num(h.cluster->high_kw) : "",
                       h.cluster ? std::to_string(h.cluster->support) : "",
                       h.cwh_spikes,
                       h.other_spikes,
                       opt_num(h.overall_fraction),
                       num(h.cwh_kwh),
                       num(h.total_kwh));
  }
  return out;
}

std::string daily_fractions_to_csv(const std::vector<HouseholdOutcome>& households)
{
  std::string out = std::string(daily_header) + "\n";
  for (const auto& h : households) {
    for (const auto& d : h.daily) {
      out += fmt::format("{},{},{},{},{}\n", h.id, format_date(d.date), opt_num(d.fraction), num(d.cwh_kwh), num(d.total_kwh));
    }
  }
  return out;
}

std::string skipped_to_csv(const std::vector<SkipRecord>& skipped)
{
  std::string out = std::string(skipped_header) + "\n";
  for (const auto& s : skipped) {
    std::string reason = s.reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    std::replace(reason.begin(), reason.end(), '\n', ' ');
    out += fmt::format("{},{}\n", s.id, reason);
  }
  return out;
}

std::vector<HouseholdOutcome> households_from_csv(std::string_view households_csv, std::string_view daily_csv)
{
  std::vector<HouseholdOutcome> out;
  std::map<std::string, std::size_t> index;
  for (const auto& row : csv_rows(households_csv, households_header)) {
    if (row.size() != 12) {
      throw SchemaError("households table row has the wrong number of fields");
    }
    HouseholdOutcome h;
    h.id = std::string(row[0]);
    h.heating_type = std::string(row[1]);
    h.found = row[2] == "1";
    if (!row[3].empty()) {
      h.cluster = PowerCluster{ to_double(row[4]), to_double(row[5]), to_double(row[3]), to_size(row[6]) };
    }
    h.cwh_spikes = to_size(row[7]);
    h.other_spikes = to_size(row[8]);
    h.overall_fraction = to_opt_double(row[9]);
    h.cwh_kwh = to_double(row[10]);
    h.total_kwh = to_double(row[11]);
    index[h.id] = out.size();
    out.push_back(std::move(h));
  }
  for (const auto& row : csv_rows(daily_csv, daily_header)) {
    if (row.size() != 5) {
      throw SchemaError("daily table row has the wrong number of fields");
    }
    auto it = index.find(std::string(row[0]));
    if (it == index.end()) {
      throw SchemaError(fmt::format("daily row for unknown household '{}'", row[0]));
    }
    DailyFraction d;
    d.date = to_date(row[1]);
    d.fraction = to_opt_double(row[2]);
    d.cwh_kwh = to_double(row[3]);
    d.total_kwh = to_double(row[4]);
    out[it->second].daily.push_back(d);
  }
  return out;
}

std::vector<SkipRecord> skipped_from_csv(std::string_view csv)
{
  std::vector<SkipRecord> out;
  for (const auto& row : csv_rows(csv, skipped_header)) {
    if (row.size() != 2) {
      throw SchemaError("skip table row has the wrong number of fields");
    }
    out.push_back({ std::string(row[0]), std::string(row[1]) });
  }
  return out;
}

std::string detection_by_type_csv(const BatchSummary& summary)
{
  std::string out = "water_heating_type,households,detections,detection_fraction\n";
  for (const auto& [type, g] : summary.groups) {
    auto f = g.detection_fraction();
    out += fmt::format("{},{},{},{}\n", type, g.households, g.detections, f ? fmt::format("{:.6f}", *f) : "");
  }
  return out;
}

std::string power_histogram_csv(const BatchSummary& summary)
{
  std::string out = "bin_low_kw,bin_high_kw,count,power_class\n";
  const auto& h = summary.power;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    double lo = h.bin_low(i);
    double hi = h.bin_low(i + 1);
    out += fmt::format("{:.2f},{:.2f},{},{}\n", lo, hi, h.counts[i], power_class_of(0.5 * (lo + hi)));
  }
  return out;
}

std::string fraction_histogram_csv(const Histogram& h)
{
  std::string out = "bin_low,bin_high,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out += fmt::format("{:.2f},{:.2f},{}\n", h.bin_low(i), h.bin_low(i + 1), h.counts[i]);
  }
  return out;
}

std::string offpeak_distribution_csv(const std::vector<HouseholdMetadata>& metadata)
{
  std::vector<std::size_t> slots(minutes_per_day / 30, 0);
  for (const auto& m : metadata) {
    if (!m.schedule) {
      continue;
    }
    for (std::size_t s = 0; s < slots.size(); ++s) {
      if (m.schedule->contains(static_cast<int>(s) * 30)) {
        ++slots[s];
      }
    }
  }
  std::string out = "slot_start,households_offpeak\n";
  for (std::size_t s = 0; s < slots.size(); ++s) {
    out += fmt::format("{:02}:{:02},{}\n", s * 30 / 60, s * 30 % 60, slots[s]);
  }
  return out;
}

std::string offpeak_range_counts_csv(const std::vector<HouseholdMetadata>& metadata)
{
  std::size_t by_count[4] = { 0, 0, 0, 0 };
  for (const auto& m : metadata) {
    if (m.schedule) {
      ++by_count[std::min<std::size_t>(3, m.schedule->intervals().size())];
    }
  }
  return fmt::format("ranges,households\n1,{}\n2,{}\n3,{}\n", by_count[1], by_count[2], by_count[3]);
}

} // namespace cwh
