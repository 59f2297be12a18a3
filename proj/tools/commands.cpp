#include "commands.hpp"

#include "segregation/diagnostics.hpp"
#include "segregation/dynamics_nonlocal.hpp"
#include "segregation/errors.hpp"
#include "segregation/stability.hpp"
#include "segregation/steady_state.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>

namespace segregation::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream os(p);
    if (!os) throw ConfigError("cannot write " + p.string());
    os << text;
    if (text.empty() || text.back() != '\n') os << '\n';
}

std::string step_name(const char* prefix, long step) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%09ld.csv", prefix, step);
    return buf;
}

} // namespace

SimulationResult run_simulation(const SimConfig& c, const std::optional<fs::path>& out) {
    c.validate();
    const SpeciesState initial = initial_state(c);
    if (out) {
        fs::create_directories(*out);
        write_text(*out / "config.json", config_to_json(c));
    }
    const bool blue = initial.has_blue();
    std::vector<int> bumps;
    std::vector<double> times;
    double worst_box = 0.0;
    Observer observe = [&](long step, double t, const SpeciesState& s) {
        bumps.push_back(bump_count(s.r));
        times.push_back(t);
        worst_box = std::max(worst_box, box_violation(s));
        if (!out) return;
        {
            std::ofstream os(*out / step_name("r", step));
            write_csv(os, s.r, t);
        }
        if (blue) {
            std::ofstream os(*out / step_name("b", step));
            write_csv(os, s.b, t);
        }
    };
    Trajectory tr = c.model == ModelKind::LocalPDE ? run_local(initial, c.params, c.t_end, c.output_stride, observe)
                                                   : run_nonlocal(initial, c.params, c.t_end, c.output_stride, observe);
    SimulationResult res{initial, std::move(tr)};
    res.bump_counts = std::move(bumps);
    res.record_times = std::move(times);
    res.max_box_violation = worst_box;
    const auto& rec = res.trajectory.records;
    for (const auto& e : rec) {
        res.mass_drift_r = std::max(res.mass_drift_r, std::abs(e.mass_r - rec.front().mass_r));
        res.mass_drift_b = std::max(res.mass_drift_b, std::abs(e.mass_b - rec.front().mass_b));
    }
    res.initial_amplitude = perturbation_amplitude(res.initial.r);
    res.final_amplitude = perturbation_amplitude(res.trajectory.final_state.r);
    if (out) {
        std::ofstream os(*out / "entropy.csv");
        write_entropy_csv(os, rec);
        write_text(*out / "summary.json", simulation_summary_json(c, res));
    }
    return res;
}

std::string simulation_summary_json(const SimConfig& c, const SimulationResult& r) {
    ordered_json j;
    const auto& fin = r.trajectory.final_state;
    j["name"] = c.name;
    j["model"] = to_string(c.model);
    j["seed"] = c.initial.seed;
    j["t_final"] = r.trajectory.t_final;
    j["steps"] = r.trajectory.steps;
    j["initial_amplitude"] = r.initial_amplitude;
    j["final_amplitude"] = r.final_amplitude;
    j["amplitude_ratio"] = r.initial_amplitude > 0.0 ? ordered_json(r.final_amplitude / r.initial_amplitude) : ordered_json(nullptr);
    j["decayed"] = r.final_amplitude < r.initial_amplitude;
    const Mode m = dominant_mode(fin.r);
    if (c.dimension == 1) j["dominant_mode"] = m.mx;
    else j["dominant_mode"] = {m.mx, m.my};
    j["bump_count"] = r.bump_counts.empty() ? 0 : r.bump_counts.back();
    j["bump_counts"] = r.bump_counts;
    j["mass_drift_r"] = r.mass_drift_r;
    j["mass_drift_b"] = r.mass_drift_b;
    j["max_box_violation"] = r.max_box_violation;
    j["correlation_rb"] = fin.has_blue() ? ordered_json(correlation(fin.r, fin.b)) : ordered_json(nullptr);
    return j.dump(2);
}

int cmd_simulate(const SimConfig& c, const fs::path& out) {
    const auto r = run_simulation(c, out);
    std::cout << simulation_summary_json(c, r) << '\n';
    return 0;
}

int cmd_stability(const SimConfig& c, const fs::path& out) {
    c.validate();
    const ConstantState s{c.initial.r0, c.initial.b0};
    const auto rep = classify(c.params, s, c.model, c.stability.xi_max, c.stability.n_xi, c.dimension);
    fs::create_directories(out);
    write_text(out / "config.json", config_to_json(c));
    {
        std::ofstream os(out / "dispersion.csv");
        write_dispersion_csv(os, rep);
    }
    const std::string js = summary_json(rep);
    write_text(out / "stability.json", js);
    std::cout << js << '\n';
    return 0;
}

int cmd_steady(const SimConfig& c, const fs::path& out) {
    c.validate();
    const PlateauSpec spec{c.initial.r0, c.params.C_rr, c.params.epsilon, c.params.C_r};
    spec.validate();
    const Grid grid(1, c.steady.n);
    fs::create_directories(out);
    write_text(out / "config.json", config_to_json(c));
    ordered_json all = ordered_json::object();
    std::optional<SteadyProfile> bvp;
    if (c.steady.method != "fixed_point") {
        bvp = solve_plateau_bvp(spec, c.steady.k, grid);
        std::ofstream os(out / "profile_bvp.csv");
        write_profile_csv(os, *bvp);
        const auto meta = profile_metadata_json(*bvp, spec, "bvp");
        write_text(out / "steady_bvp.json", meta);
        all["bvp"] = ordered_json::parse(meta);
    }
    if (c.steady.method != "bvp") {
        DensityField init = bvp ? bvp->r : DensityField::sample(grid, [&](double x, double) {
            return spec.M + 0.5 * std::min(spec.M, 1.0 - spec.M) * std::cos(2.0 * std::numbers::pi * c.steady.k * x);
        });
        const auto fp = fixed_point_integral(spec, init);
        std::ofstream os(out / "profile_fixed_point.csv");
        write_profile_csv(os, fp);
        const auto meta = profile_metadata_json(fp, spec, "fixed_point");
        write_text(out / "steady_fixed_point.json", meta);
        all["fixed_point"] = ordered_json::parse(meta);
    }
    std::cout << all.dump(2) << '\n';
    return 0;
}

int cmd_bump_count(const fs::path& snapshot) {
    std::ifstream in(snapshot);
    if (!in) throw ConfigError("cannot open snapshot " + snapshot.string());
    return bump_count(read_csv(in).field);
}

std::string error_json(const std::string& kind, const std::string& message) {
    ordered_json j;
    j["error"] = kind;
    j["message"] = message;
    return j.dump();
}

} // namespace segregation::cli
