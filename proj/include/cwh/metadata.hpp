#pragma once

#include "cwh/data.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cwh {

/// Per-household schedule and self-reported information.
///
/// On disk this is a JSON document, either a single household object or
/// `{"households": [ ... ]}`:
///
///     {"id": "h001", "offpeak": ["22:30-06:30"], "water_heating_type": "elec",
///      "surface_m2": 80, "inhabitants": 3, "offpeak_pricing": true}
///
/// Only `offpeak` is required to run detection.
struct HouseholdMetadata
{
  std::string id;
  std::optional<OffPeakSchedule> schedule;
  std::string schedule_error; // why `schedule` is empty, if it is
  std::optional<std::string> water_heating_type; // elec | gas | other
  std::optional<double> surface_m2;
  std::optional<int> inhabitants;
  std::optional<bool> offpeak_pricing;
};

/// Parses a metadata document. A malformed `offpeak` list does not throw: the
/// household is kept with `schedule_error` set. Structural JSON problems throw
/// SchemaError.
std::vector<HouseholdMetadata> parse_metadata(std::string_view json_text, bool strict_schedule = false);

std::string format_metadata(const std::vector<HouseholdMetadata>& households);

bool is_known_heating_type(std::string_view type);

} // namespace cwh
