#include "cwh/batch.hpp"
#include "cwh/classifier.hpp"
#include "cwh/disagg.hpp"
#include "cwh/error.hpp"
#include "cwh/evaluate.hpp"
#include "cwh/io.hpp"
#include "cwh/kde.hpp"
#include "cwh/metadata.hpp"
#include "cwh/synth.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace py = pybind11;
using namespace cwh;

namespace {

TimeZone zone(const std::string& name)
{
  return name.empty() ? TimeZone::default_zone() : TimeZone::locate(name);
}

DetectionConfig make_config(std::optional<std::pair<double, double>> expected_range,
                            int window_days,
                            std::optional<std::size_t> min_support,
                            const std::string& valley)
{
  DetectionConfig c;
  if (expected_range) {
    c.expected = { expected_range->first, expected_range->second };
  }
  c.window_days = window_days;
  c.min_support = min_support;
  if (valley == "first") {
    c.valley_strategy = kde::MinimumStrategy::lowest_abscissa;
  } else if (valley != "deepest") {
    throw ValueError("valley must be 'deepest' or 'first'");
  }
  return c;
}

struct Household
{
  LoadCurve curve;
  OffPeakSchedule schedule;
};

Household load(const std::string& csv_text,
               const std::vector<std::string>& offpeak,
               const std::string& tz,
               const std::string& household_id)
{
  return { parse_load_curve(csv_text, zone(tz), Minutes{ 30 }, household_id), OffPeakSchedule::from_ranges(offpeak) };
}

} // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Water heater detection on half-hourly load curves";

  auto base = py::register_exception<Error>(m, "CwhError", PyExc_RuntimeError);
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<ValueError>(m, "DomainValueError", base.ptr());
  py::register_exception<AlignmentError>(m, "AlignmentError", base.ptr());
  py::register_exception<EmptyInputError>(m, "EmptyInputError", base.ptr());
  py::register_exception<DegenerateSampleError>(m, "DegenerateSampleError", base.ptr());
  py::register_exception<UndefinedFractionError>(m, "UndefinedFractionError", base.ptr());

  m.def(
    "detect",
    [](const std::string& csv_text, const std::vector<std::string>& offpeak, const std::string& tz,
       const std::string& household_id, std::optional<std::pair<double, double>> expected_range, int window_days,
       std::optional<std::size_t> min_support, const std::string& valley) {
      auto h = load(csv_text, offpeak, tz, household_id);
      auto cfg = make_config(expected_range, window_days, min_support, valley);
      py::gil_scoped_release release;
      auto r = detect_cwh(h.curve, h.schedule, cfg);
      return detection_to_json(r, RunInfo{ cfg, h.curve.tz.name() }, h.curve.tz);
    },
    py::arg("csv_text"), py::arg("offpeak"), py::arg("tz") = "", py::arg("household_id") = "",
    py::arg("expected_range") = py::none(), py::arg("window_days") = 7, py::arg("min_support") = py::none(),
    py::arg("valley") = "deepest", "Detection result as a JSON document.");

  m.def(
    "disaggregate",
    [](const std::string& csv_text, const std::vector<std::string>& offpeak, const std::string& tz,
       std::optional<std::pair<double, double>> expected_range) {
      auto h = load(csv_text, offpeak, tz, "");
      auto r = detect_cwh(h.curve, h.schedule, make_config(expected_range, 7, std::nullopt, "deepest"));
      auto attr = attribute(h.curve, r);
      auto f = consumption_fractions(h.curve, attr);
      py::dict out;
      out["found"] = r.found;
      out["cwh_power_kw"] = attr.cwh_power;
      out["overall_fraction"] = f.overall;
      out["cwh_kwh"] = f.cwh_kwh;
      out["total_kwh"] = f.total_kwh;
      out["fractions_csv"] = format_fractions(f);
      out["activations_csv"] = format_activations(to_activations(r), h.curve.tz);
      return out;
    },
    py::arg("csv_text"), py::arg("offpeak"), py::arg("tz") = "", py::arg("expected_range") = py::none());

  m.def(
    "interval_confusion",
    [](const std::vector<double>& pred, const std::vector<double>& truth, double threshold_kw) {
      auto cm = interval_confusion(pred, truth, threshold_kw);
      py::dict out;
      out["tp"] = cm.tp;
      out["tn"] = cm.tn;
      out["fp"] = cm.fp;
      out["fn"] = cm.fn;
      out["precision"] = cm.precision();
      out["recall"] = cm.recall();
      return out;
    },
    py::arg("pred"), py::arg("truth"), py::arg("threshold_kw") = activation_threshold_kw);

  m.def("scott_bandwidth", [](const std::vector<double>& xs) { return kde::scott_bandwidth(xs); }, py::arg("samples"));

  m.def(
    "density",
    [](const std::vector<double>& xs, std::optional<double> bandwidth, std::size_t grid_points) {
      auto est = kde::evaluate_density(xs, bandwidth ? *bandwidth : kde::scott_bandwidth(xs), grid_points);
      return std::make_pair(est.grid, est.density);
    },
    py::arg("samples"), py::arg("bandwidth") = py::none(), py::arg("grid_points") = kde::default_grid_points,
    "Grid and Gaussian KDE values.");

  m.def(
    "first_local_minimum",
    [](const std::vector<double>& xs) { return kde::first_local_minimum(kde::evaluate_density(xs, kde::scott_bandwidth(xs))); },
    py::arg("samples"));

  m.def(
    "simulate",
    [](const std::string& scenario_json) {
      auto h = synth::generate(synth::parse_scenario(scenario_json));
      py::dict out;
      out["curve_csv"] = format_load_curve(h.curve);
      out["truth_csv"] = format_ground_truth(h.truth, h.curve.tz);
      out["metadata_json"] = format_metadata({ h.metadata });
      out["cwh_share"] = h.cwh_share();
      out["offpeak"] = h.metadata.schedule->to_ranges();
      return out;
    },
    py::arg("scenario_json"));

  m.def(
    "anonymize",
    [](const std::string& csv_text, std::uint64_t seed, const std::string& tz) {
      return format_load_curve(synth::anonymize(parse_load_curve(csv_text, zone(tz)), seed));
    },
    py::arg("csv_text"), py::arg("seed") = 0, py::arg("tz") = "");

  m.def(
    "run_batch",
    [](const std::string& dataset_dir, const std::string& metadata_json, unsigned workers, const std::string& tz) {
      BatchConfig cfg;
      cfg.workers = workers;
      cfg.tz = zone(tz);
      auto meta = parse_metadata(metadata_json);
      py::gil_scoped_release release;
      return summary_to_json(run_batch(dataset_dir, meta, cfg).summary);
    },
    py::arg("dataset_dir"), py::arg("metadata_json"), py::arg("workers") = 1, py::arg("tz") = "",
    "Batch summary as a JSON document.");
}
