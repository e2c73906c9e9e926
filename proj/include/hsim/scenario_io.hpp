#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hsim/engine.hpp"

namespace hsim {

// Scenario files are "key = value" lines; '#' starts a comment. A `preset`
// line resets the scenario to a named preset and should come first.
Scenario preset_scenario(std::string_view name);
const std::vector<std::string>& preset_names();

// Throws hsim::Error on an unknown key or a malformed value.
void apply_setting(Scenario& scenario, std::string_view key, std::string_view value);
// "key=value" form used by --set.
void apply_override(Scenario& scenario, std::string_view assignment);

Scenario read_scenario(std::istream& in, const std::string& source = "<stream>");
Scenario load_scenario(const std::string& path);

// Every key with its current value, in a fixed order. Feeding the pairs back
// through apply_setting reproduces the scenario.
std::vector<std::pair<std::string, std::string>> scenario_settings(const Scenario& scenario);
void write_scenario(std::ostream& out, const Scenario& scenario);

// Shortest round-trip text for a double.
std::string format_double(double v);

}  // namespace hsim
