#pragma once

// Run configuration shared by the command-line front end and the acceptance
// suite, JSON (de)serialization and the named experiment presets.

#include "segregation/model.hpp"
#include "segregation/stability.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace segregation {

struct InitialCondition {
    std::string kind = "sine";  // constant | sine | random
    double r0 = 0.3;
    double b0 = 0.0;
    double amplitude = 0.02;
    int mode_x = 2;  // sin(2 pi mode_x x) [cos(2 pi mode_y y) in 2D]
    int mode_y = 0;
    std::string blue = "constant";  // constant | mirrored (b = b0 - perturbation)
    std::uint64_t seed = 1;
};

struct StabilityOptions {
    double xi_max = 10.0;
    int n_xi = 2000;
};

struct SteadyOptions {
    int k = 1;
    int n = 2000;
    std::string method = "bvp";  // bvp | fixed_point | both
};

struct SimConfig {
    std::string name = "custom";
    ModelKind model = ModelKind::LocalPDE;
    int dimension = 1;
    int n = 100;
    double t_end = 1.0;
    int output_stride = 100;
    ModelParams params;
    InitialCondition initial;
    StabilityOptions stability;
    SteadyOptions steady;
    std::string output_dir = "out";

    // Throws ConfigError on inconsistent values.
    void validate() const;
};

// Unknown keys and type mismatches raise ConfigError; absent keys keep defaults.
SimConfig config_from_json(const std::string& text);
std::string config_to_json(const SimConfig& c);
SimConfig load_config(const std::string& path);

struct Preset {
    std::string name;
    std::string description;
    SimConfig config;
};

const std::vector<Preset>& presets();
// Throws ConfigError for unknown names.
SimConfig preset(const std::string& name);

// Initial state on the configured grid. Random perturbations use a seeded
// mt19937_64 and are mean-centred so the mass equals r0 (b0) exactly up to rounding.
SpeciesState initial_state(const SimConfig& c);

} // namespace segregation
