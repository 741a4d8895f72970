#include "cwh/batch.hpp"
#include "cwh/classifier.hpp"
#include "cwh/disagg.hpp"
#include "cwh/error.hpp"
#include "cwh/evaluate.hpp"
#include "cwh/io.hpp"
#include "cwh/metadata.hpp"
#include "cwh/synth.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace cwh;

namespace {

constexpr int exit_usage = 1;
constexpr int exit_data = 2;

// Raised for option combinations CLI11 cannot express.
struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct DetectionFlags
{
  std::string expected_range;
  int window_days = 7;
  std::size_t grid_points = kde::default_grid_points;
  std::optional<std::size_t> min_support;
  int alignment_tolerance = 0;
  std::string valley = "deepest";

  void add_to(CLI::App& cmd)
  {
    cmd.add_option("--expected-range", expected_range, "Expected heater power band LOW:HIGH in kW (default 0.8:5.0)");
    cmd.add_option("--window-days", window_days, "Observation length in days")->check(CLI::PositiveNumber);
    cmd.add_option("--grid-points", grid_points, "KDE evaluation grid size")->check(CLI::Range(16, 1 << 20));
    cmd.add_option("--min-support", min_support, "Aligned spikes needed for a detection (default max(3, days/6))");
    cmd.add_option("--alignment-tolerance", alignment_tolerance, "Accepted offset from an off-peak start, minutes")
      ->check(CLI::NonNegativeNumber);
    cmd.add_option("--valley", valley, "Valley used to bound the power band")
      ->check(CLI::IsMember({ "deepest", "first" }));
  }

  DetectionConfig config() const
  {
    DetectionConfig c;
    c.window_days = window_days;
    c.detector.grid_points = grid_points;
    c.min_support = min_support;
    c.alignment_tolerance = Minutes{ alignment_tolerance };
    c.valley_strategy = valley == "first" ? kde::MinimumStrategy::lowest_abscissa : kde::MinimumStrategy::lowest_density;
    if (!expected_range.empty()) {
      auto colon = expected_range.find(':');
      if (colon == std::string::npos) {
        throw UsageError("--expected-range must look like LOW:HIGH");
      }
      try {
        c.expected.low_kw = std::stod(expected_range.substr(0, colon));
        c.expected.high_kw = std::stod(expected_range.substr(colon + 1));
      } catch (const std::exception&) {
        throw UsageError("--expected-range must look like LOW:HIGH");
      }
      if (!(c.expected.low_kw >= 0.0 && c.expected.low_kw < c.expected.high_kw)) {
        throw UsageError("--expected-range needs 0 <= LOW < HIGH");
      }
    }
    return c;
  }
};

struct CurveFlags
{
  std::string input;
  std::string schedule_file;
  std::vector<std::string> offpeak;
  std::string household;
  std::string tz;
  int step = 30;

  void add_to(CLI::App& cmd)
  {
    cmd.add_option("-i,--input", input, "Load curve CSV (timestamp,power_kw)")->required();
    auto* file = cmd.add_option("-s,--schedule", schedule_file, "Metadata JSON holding the off-peak hours");
    auto* inline_ranges = cmd.add_option("--offpeak", offpeak, "Off-peak ranges such as 22:30-06:30")->delimiter(',');
    file->excludes(inline_ranges);
    cmd.add_option("--household", household, "Household id (default: input file stem)");
    cmd.add_option("--tz", tz, "Time zone for naive timestamps (default: $CWH_TZ or Europe/Paris)");
    cmd.add_option("--step", step, "Metering step in minutes")->check(CLI::PositiveNumber);
  }

  TimeZone zone() const { return tz.empty() ? TimeZone::default_zone() : TimeZone::locate(tz); }

  std::string id() const { return household.empty() ? fs::path(input).stem().string() : household; }

  LoadCurve curve() const { return parse_load_curve(read_text_file(input), zone(), Minutes{ step }, id()); }

  OffPeakSchedule schedule() const
  {
    if (!offpeak.empty()) {
      return OffPeakSchedule::from_ranges(offpeak, Minutes{ step });
    }
    if (schedule_file.empty()) {
      throw UsageError("either --schedule or --offpeak is required");
    }
    auto meta = parse_metadata(read_text_file(schedule_file));
    const HouseholdMetadata* pick = nullptr;
    if (meta.size() == 1) {
      pick = &meta.front();
    } else {
      for (const auto& m : meta) {
        if (m.id == id()) {
          pick = &m;
        }
      }
    }
    if (!pick) {
      throw SchemaError(fmt::format("{}: no household '{}'", schedule_file, id()));
    }
    if (!pick->schedule) {
      throw ValueError(fmt::format("household '{}': {}", pick->id, pick->schedule_error));
    }
    return *pick->schedule;
  }
};

// Writes to `path`, or to stdout when it is empty or "-".
void emit(const std::string& path, const std::string& content)
{
  if (path.empty() || path == "-") {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  write_text_file(path, content);
}

void emit_if(const std::string& path, const std::string& content)
{
  if (!path.empty()) {
    emit(path, content);
  }
}

std::string slurp(const fs::path& path)
{
  if (!fs::exists(path)) {
    throw SchemaError(fmt::format("{}: no such file", path.string()));
  }
  return read_text_file(path);
}

void print_detection(const DetectionResult& r)
{
  if (r.found) {
    std::cerr << fmt::format("{}: water heater found, {:.2f} kW ({:.2f}-{:.2f}), {} heating spikes\n",
                             r.household_id, r.cluster->mode_kw, r.cluster->low_kw, r.cluster->high_kw,
                             r.cwh_spikes.size());
  } else {
    std::cerr << fmt::format("{}: no water heater found\n", r.household_id);
  }
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{ "Detect and disaggregate cumulative water heaters in half-hourly load curves" };
  app.require_subcommand(1);
  app.set_version_flag("--version", "cwh 1.0.0");

  // detect
  auto* detect = app.add_subcommand("detect", "Run detection on one household");
  CurveFlags d_curve;
  DetectionFlags d_flags;
  std::string d_output;
  std::string d_spikes;
  d_curve.add_to(*detect);
  d_flags.add_to(*detect);
  detect->add_option("-o,--output", d_output, "Detection result JSON (default: stdout)");
  detect->add_option("--spikes", d_spikes, "Also write every spike as CSV");

  // disaggregate
  auto* disagg = app.add_subcommand("disaggregate", "Attribute power to the water heater and compute fractions");
  CurveFlags g_curve;
  DetectionFlags g_flags;
  std::string g_attr;
  std::string g_fractions;
  std::string g_acts;
  g_curve.add_to(*disagg);
  g_flags.add_to(*disagg);
  disagg->add_option("--attribution", g_attr, "Per-interval water heater power CSV");
  disagg->add_option("--fractions", g_fractions, "Daily and overall fraction CSV (default: stdout)");
  disagg->add_option("--activations", g_acts, "Activation list CSV");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Compare a prediction to ground truth");
  CurveFlags e_curve;
  DetectionFlags e_flags;
  std::string e_truth;
  std::string e_pred;
  std::string e_output;
  std::string e_scatter;
  double e_threshold = activation_threshold_kw;
  e_curve.add_to(*evaluate);
  e_flags.add_to(*evaluate);
  evaluate->add_option("-t,--truth", e_truth, "Ground truth CSV (timestamp,cwh_power_kw)")->required();
  evaluate->add_option("--pred", e_pred, "Predicted power CSV; detection runs on the input when absent");
  evaluate->add_option("-o,--output", e_output, "Evaluation JSON (default: stdout)");
  evaluate->add_option("--scatter", e_scatter, "Predicted against measured power, per interval");
  evaluate->add_option("--threshold", e_threshold, "Activation threshold in kW")->check(CLI::NonNegativeNumber);

  // batch
  auto* batch = app.add_subcommand("batch", "Run detection over a dataset directory");
  std::string b_dataset;
  std::string b_meta;
  std::string b_out;
  std::string b_tz;
  int b_step = 30;
  unsigned b_workers = 1;
  std::size_t b_min_samples = 1440;
  bool b_no_pricing = false;
  DetectionFlags b_flags;
  batch->add_option("-d,--dataset", b_dataset, "Directory of <id>.csv load curves")->required();
  batch->add_option("-m,--metadata", b_meta, "Metadata JSON for the households")->required();
  batch->add_option("-o,--out-dir", b_out, "Output directory")->required();
  batch->add_option("--tz", b_tz, "Time zone for naive timestamps (default: $CWH_TZ or Europe/Paris)");
  batch->add_option("--step", b_step, "Metering step in minutes")->check(CLI::PositiveNumber);
  batch->add_option("-j,--workers", b_workers, "Worker threads")->check(CLI::Range(1u, 256u));
  batch->add_option("--min-samples", b_min_samples, "Present samples a household needs");
  batch->add_flag("--no-pricing-gate", b_no_pricing, "Keep households without an off-peak contract");
  b_flags.add_to(*batch);

  // report
  auto* report = app.add_subcommand("report", "Build figure tables from batch outputs");
  std::string r_batch;
  std::string r_meta;
  std::string r_out;
  report->add_option("-b,--batch-dir", r_batch, "Output directory of a batch run")->required();
  report->add_option("-m,--metadata", r_meta, "Metadata JSON, for off-peak hour tables");
  report->add_option("-o,--out-dir", r_out, "Output directory (default: the batch directory)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Generate synthetic households with ground truth");
  std::string s_scenario;
  std::size_t s_count = 0;
  std::uint64_t s_seed = 0;
  double s_cwh_share = 1.0;
  int s_days = 31;
  std::string s_out;
  auto* s_file = simulate->add_option("--scenario", s_scenario, "Scenario JSON");
  auto* s_fleet = simulate->add_option("--count", s_count, "Draw this many households instead")->check(CLI::PositiveNumber);
  s_file->excludes(s_fleet);
  simulate->add_option("--seed", s_seed, "Fleet seed");
  simulate->add_option("--cwh-share", s_cwh_share, "Share of fleet households with a heater")->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--days", s_days, "Days per fleet household")->check(CLI::PositiveNumber);
  simulate->add_option("-o,--out-dir", s_out, "Output directory")->required();

  // anonymize
  auto* anonymize = app.add_subcommand("anonymize", "Add small positive noise to a load curve");
  std::string a_input;
  std::string a_output;
  std::string a_tz;
  int a_step = 30;
  std::uint64_t a_seed = 0;
  anonymize->add_option("-i,--input", a_input, "Load curve CSV")->required();
  anonymize->add_option("-o,--output", a_output, "Noisy load curve CSV (default: stdout)");
  anonymize->add_option("--seed", a_seed, "Noise seed");
  anonymize->add_option("--tz", a_tz, "Time zone for naive timestamps (default: $CWH_TZ or Europe/Paris)");
  anonymize->add_option("--step", a_step, "Metering step in minutes")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : exit_usage;
  }

  try {
    if (*detect) {
      auto cfg = d_flags.config();
      auto curve = d_curve.curve();
      auto r = detect_cwh(curve, d_curve.schedule(), cfg);
      print_detection(r);
      emit(d_output, detection_to_json(r, RunInfo{ cfg, curve.tz.name() }, curve.tz));
      emit_if(d_spikes, spikes_to_csv(r, curve.tz));
    } else if (*disagg) {
      auto cfg = g_flags.config();
      auto curve = g_curve.curve();
      auto r = detect_cwh(curve, g_curve.schedule(), cfg);
      print_detection(r);
      auto attr = attribute(curve, r);
      emit_if(g_attr, format_attribution(attr));
      emit_if(g_acts, format_activations(to_activations(r), curve.tz));
      emit(g_fractions, format_fractions(consumption_fractions(curve, attr)));
    } else if (*evaluate) {
      auto curve = e_curve.curve();
      auto truth = parse_ground_truth(slurp(e_truth), curve.tz, curve.start, curve.step, curve.size());
      AttributionSeries pred;
      std::vector<Activation> acts;
      std::string source;
      if (e_pred.empty()) {
        auto r = detect_cwh(curve, e_curve.schedule(), e_flags.config());
        pred = attribute(curve, r);
        acts = to_activations(r);
        source = "detection";
      } else {
        auto series = parse_ground_truth(slurp(e_pred), curve.tz, curve.start, curve.step, curve.size());
        pred.start = series.start;
        pred.step = series.step;
        pred.tz = curve.tz;
        pred.cwh_power = series.cwh_power;
        acts = series_activations(series.start, series.step, series.cwh_power, e_threshold);
        source = "series";
      }
      auto rep = evaluate_prediction(pred, acts, truth, e_threshold);
      rep.prediction_source = source;
      emit(e_output, evaluation_to_json(rep, curve.tz));
      emit_if(e_scatter, interval_scatter_csv(pred, truth));
    } else if (*batch) {
      BatchConfig cfg;
      cfg.detection = b_flags.config();
      cfg.min_samples = b_min_samples;
      cfg.require_offpeak_pricing = !b_no_pricing;
      cfg.workers = b_workers;
      cfg.tz = b_tz.empty() ? TimeZone::default_zone() : TimeZone::locate(b_tz);
      cfg.step = Minutes{ b_step };
      auto meta = parse_metadata(slurp(b_meta));
      auto r = run_batch(b_dataset, meta, cfg);
      fs::path out(b_out);
      write_text_file(out / "summary.json", summary_to_json(r.summary));
      write_text_file(out / "households.csv", households_to_csv(r.households));
      write_text_file(out / "daily_fractions.csv", daily_fractions_to_csv(r.households));
      write_text_file(out / "skipped.csv", skipped_to_csv(r.skipped));
      std::cerr << fmt::format("{} households processed, {} skipped\n", r.summary.processed, r.summary.skipped);
    } else if (*report) {
      fs::path in(r_batch);
      fs::path out = r_out.empty() ? in : fs::path(r_out);
      auto households = households_from_csv(slurp(in / "households.csv"), slurp(in / "daily_fractions.csv"));
      auto skipped = skipped_from_csv(slurp(in / "skipped.csv"));
      auto s = summarize(households, skipped);
      write_text_file(out / "detection_by_type.csv", detection_by_type_csv(s));
      write_text_file(out / "power_histogram.csv", power_histogram_csv(s));
      write_text_file(out / "daily_fraction_histogram.csv", fraction_histogram_csv(s.daily_fraction));
      write_text_file(out / "overall_fraction_histogram.csv", fraction_histogram_csv(s.overall_fraction));
      if (!r_meta.empty()) {
        auto meta = parse_metadata(slurp(r_meta));
        write_text_file(out / "offpeak_distribution.csv", offpeak_distribution_csv(meta));
        write_text_file(out / "offpeak_ranges.csv", offpeak_range_counts_csv(meta));
      }
    } else if (*simulate) {
      std::vector<synth::ScenarioConfig> scenarios;
      if (!s_scenario.empty()) {
        scenarios.push_back(synth::parse_scenario(slurp(s_scenario)));
      } else if (s_count > 0) {
        synth::FleetOptions opt;
        opt.days = s_days;
        for (std::size_t k = 0; k < s_count; ++k) {
          // Spread heater households evenly over the fleet.
          bool with = std::floor(static_cast<double>(k + 1) * s_cwh_share) > std::floor(static_cast<double>(k) * s_cwh_share);
          scenarios.push_back(synth::sample_scenario(s_seed, k, with, opt));
        }
      } else {
        throw UsageError("either --scenario or --count is required");
      }
      fs::path out(s_out);
      std::vector<HouseholdMetadata> meta;
      for (const auto& sc : scenarios) {
        auto h = synth::generate(sc);
        write_text_file(out / (h.curve.household_id + ".csv"), format_load_curve(h.curve));
        write_text_file(out / "truth" / (h.curve.household_id + ".csv"), format_ground_truth(h.truth, h.curve.tz));
        meta.push_back(h.metadata);
      }
      write_text_file(out / "metadata.json", format_metadata(meta));
    } else if (*anonymize) {
      auto tz = a_tz.empty() ? TimeZone::default_zone() : TimeZone::locate(a_tz);
      auto curve = parse_load_curve(slurp(a_input), tz, Minutes{ a_step });
      emit(a_output, format_load_curve(synth::anonymize(curve, a_seed)));
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_data;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_data;
  }
  return 0;
}
