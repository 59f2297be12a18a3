#pragma once

#include "segregation/config.hpp"
#include "segregation/dynamics_local.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace segregation::cli {

struct SimulationResult {
    SpeciesState initial;
    Trajectory trajectory;
    double initial_amplitude = 0.0;
    double final_amplitude = 0.0;
    double mass_drift_r = 0.0;  // max |mass(t) - mass(0)| over records
    double mass_drift_b = 0.0;
    double max_box_violation = 0.0;
    std::vector<int> bump_counts;  // r at every record
    std::vector<double> record_times;
};

// Runs the configured dynamics. When out is set, writes config.json,
// entropy.csv, snapshots r_<step>.csv (and b_<step>.csv) and summary.json there.
SimulationResult run_simulation(const SimConfig& c, const std::optional<std::filesystem::path>& out);
std::string simulation_summary_json(const SimConfig& c, const SimulationResult& r);

int cmd_simulate(const SimConfig& c, const std::filesystem::path& out);
int cmd_stability(const SimConfig& c, const std::filesystem::path& out);
int cmd_steady(const SimConfig& c, const std::filesystem::path& out);
int cmd_bump_count(const std::filesystem::path& snapshot);

// {"error": kind, "message": text}
std::string error_json(const std::string& kind, const std::string& message);

} // namespace segregation::cli
