#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "neurotrig/sim.hpp"

namespace neurotrig {

/// Reads a YAML scenario with sections topology, plant, basis, gains,
/// thresholds, reference and run. Absent fields take the demonstration
/// values. Errors name the file, line and key.
Scenario parse_scenario(const std::string& text, const std::string& source = "<string>");
Scenario load_scenario(const std::filesystem::path& path);

void write_scenario(const Scenario& scenario, std::ostream& os);

/// Applies "section.field=value" style overrides used by sweeps, e.g.
/// thresholds.state, thresholds.filter, thresholds.leader, gains.kappa1,
/// gains.c, gains.gamma_y0, gains.sigma_y0, gains.sigma_w, gains.gamma_w,
/// gains.mu_filter, basis.width, run.step, run.horizon.
void apply_parameter(Scenario& scenario, const std::string& name, double value);

}  // namespace neurotrig
