#include "cwh/metadata.hpp"

#include "cwh/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

namespace cwh {

using nlohmann::json;

namespace {

HouseholdMetadata parse_household(const json& j, bool strict_schedule)
{
  if (!j.is_object()) {
    throw SchemaError("household metadata entries must be objects");
  }
  HouseholdMetadata m;
  if (auto it = j.find("id"); it != j.end()) {
    if (!it->is_string()) {
      throw SchemaError("household 'id' must be a string");
    }
    m.id = it->get<std::string>();
  }
  if (auto it = j.find("offpeak"); it != j.end()) {
    try {
      if (!it->is_array()) {
        throw ValueError("'offpeak' must be a list of HH:MM-HH:MM strings");
      }
      std::vector<std::string> ranges;
      for (const auto& r : *it) {
        if (!r.is_string()) {
          throw ValueError("'offpeak' entries must be strings");
        }
        ranges.push_back(r.get<std::string>());
      }
      m.schedule = OffPeakSchedule::from_ranges(ranges, Minutes{ 30 }, strict_schedule);
    } catch (const ValueError& e) {
      m.schedule_error = e.what();
    }
  } else {
    m.schedule_error = "off-peak hours unknown";
  }
  if (auto it = j.find("water_heating_type"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) {
      throw SchemaError("'water_heating_type' must be a string");
    }
    m.water_heating_type = it->get<std::string>();
  }
  if (auto it = j.find("surface_m2"); it != j.end() && !it->is_null()) {
    if (!it->is_number()) {
      throw SchemaError("'surface_m2' must be a number");
    }
    m.surface_m2 = it->get<double>();
  }
  if (auto it = j.find("inhabitants"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) {
      throw SchemaError("'inhabitants' must be an integer");
    }
    m.inhabitants = it->get<int>();
  }
  if (auto it = j.find("offpeak_pricing"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) {
      throw SchemaError("'offpeak_pricing' must be a boolean");
    }
    m.offpeak_pricing = it->get<bool>();
  }
  return m;
}

} // namespace

std::vector<HouseholdMetadata> parse_metadata(std::string_view json_text, bool strict_schedule)
{
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(fmt::format("metadata is not valid JSON: {}", e.what()));
  }
  std::vector<HouseholdMetadata> out;
  if (doc.is_object() && doc.contains("households")) {
    const auto& list = doc["households"];
    if (!list.is_array()) {
      throw SchemaError("'households' must be a list");
    }
    for (const auto& h : list) {
      out.push_back(parse_household(h, strict_schedule));
    }
  } else {
    out.push_back(parse_household(doc, strict_schedule));
  }
  return out;
}

std::string format_metadata(const std::vector<HouseholdMetadata>& households)
{
  json list = json::array();
  for (const auto& m : households) {
    json h;
    h["id"] = m.id;
    if (m.schedule) {
      h["offpeak"] = m.schedule->to_ranges();
    }
    if (m.water_heating_type) {
      h["water_heating_type"] = *m.water_heating_type;
    }
    if (m.surface_m2) {
      h["surface_m2"] = *m.surface_m2;
    }
    if (m.inhabitants) {
      h["inhabitants"] = *m.inhabitants;
    }
    if (m.offpeak_pricing) {
      h["offpeak_pricing"] = *m.offpeak_pricing;
    }
    list.push_back(std::move(h));
  }
  json doc;
  doc["households"] = std::move(list);
  return doc.dump(2) + "\n";
}

bool is_known_heating_type(std::string_view type)
{
  return type == "elec" || type == "gas" || type == "other";
}

} // namespace cwh
