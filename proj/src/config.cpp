#include "segregation/config.hpp"

#include "segregation/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace segregation {

using nlohmann::ordered_json;

void SimConfig::validate() const {
    if (dimension != 1 && dimension != 2) throw ConfigError("dimension must be 1 or 2");
    if (n < 8) throw ConfigError("n must be at least 8");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be finite and non-negative");
    if (output_stride < 1) throw ConfigError("output_stride must be at least 1");
    params.validate();
    const auto& ic = initial;
    if (ic.kind != "constant" && ic.kind != "sine" && ic.kind != "random") {
        throw ConfigError("initial.kind must be constant, sine or random");
    }
    if (ic.blue != "constant" && ic.blue != "mirrored") throw ConfigError("initial.blue must be constant or mirrored");
    if (!(ic.r0 >= 0.0) || !(ic.b0 >= 0.0) || !(ic.r0 + ic.b0 <= 1.0)) {
        throw ConfigError("initial r0, b0 must satisfy 0 <= r0, b0 and r0 + b0 <= 1");
    }
    if (!(ic.amplitude >= 0.0)) throw ConfigError("initial.amplitude must be non-negative");
    if (!(stability.xi_max > 0.0) || stability.n_xi < 2) throw ConfigError("stability needs xi_max > 0 and n_xi >= 2");
    if (steady.k < 1 || steady.n < 8) throw ConfigError("steady needs k >= 1 and n >= 8");
    if (steady.method != "bvp" && steady.method != "fixed_point" && steady.method != "both") {
        throw ConfigError("steady.method must be bvp, fixed_point or both");
    }
}

namespace {

template <class T>
void read(const ordered_json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

void reject_unknown(const ordered_json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (const char* key : keys) known = known || k == key;
        if (!known) throw ConfigError("unknown key '" + k + "' in " + where);
    }
}

} // namespace

SimConfig config_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(j,
                   {"name", "model", "dimension", "n", "dt", "t_end", "output_stride", "params", "initial",
                    "stability", "steady", "output_dir"},
                   "config");
    SimConfig c;
    read(j, "name", c.name);
    if (j.contains("model")) {
        std::string m;
        read(j, "model", m);
        if (m == "local_pde") c.model = ModelKind::LocalPDE;
        else if (m == "nonlocal_integro") c.model = ModelKind::NonlocalIntegro;
        else throw ConfigError("model must be local_pde or nonlocal_integro");
    }
    read(j, "dimension", c.dimension);
    read(j, "n", c.n);
    read(j, "dt", c.params.dt);
    read(j, "t_end", c.t_end);
    read(j, "output_stride", c.output_stride);
    read(j, "output_dir", c.output_dir);
    if (j.contains("params")) {
        const auto& p = j["params"];
        reject_unknown(p, {"C_r", "C_b", "C_rr", "C_rb", "C_br", "C_bb", "epsilon"}, "params");
        read(p, "C_r", c.params.C_r);
        read(p, "C_b", c.params.C_b);
        read(p, "C_rr", c.params.C_rr);
        read(p, "C_rb", c.params.C_rb);
        read(p, "C_br", c.params.C_br);
        read(p, "C_bb", c.params.C_bb);
        read(p, "epsilon", c.params.epsilon);
    }
    if (j.contains("initial")) {
        const auto& p = j["initial"];
        reject_unknown(p, {"kind", "r0", "b0", "amplitude", "mode_x", "mode_y", "blue", "seed"}, "initial");
        read(p, "kind", c.initial.kind);
        read(p, "r0", c.initial.r0);
        read(p, "b0", c.initial.b0);
        read(p, "amplitude", c.initial.amplitude);
        read(p, "mode_x", c.initial.mode_x);
        read(p, "mode_y", c.initial.mode_y);
        read(p, "blue", c.initial.blue);
        read(p, "seed", c.initial.seed);
    }
    if (j.contains("stability")) {
        const auto& p = j["stability"];
        reject_unknown(p, {"xi_max", "n_xi"}, "stability");
        read(p, "xi_max", c.stability.xi_max);
        read(p, "n_xi", c.stability.n_xi);
    }
    if (j.contains("steady")) {
        const auto& p = j["steady"];
        reject_unknown(p, {"k", "n", "method"}, "steady");
        read(p, "k", c.steady.k);
        read(p, "n", c.steady.n);
        read(p, "method", c.steady.method);
    }
    c.validate();
    return c;
}

std::string config_to_json(const SimConfig& c) {
    ordered_json j;
    j["name"] = c.name;
    j["model"] = to_string(c.model);
    j["dimension"] = c.dimension;
    j["n"] = c.n;
    j["dt"] = c.params.dt;
    j["t_end"] = c.t_end;
    j["output_stride"] = c.output_stride;
    j["params"] = {{"C_r", c.params.C_r},   {"C_b", c.params.C_b},   {"C_rr", c.params.C_rr},
                   {"C_rb", c.params.C_rb}, {"C_br", c.params.C_br}, {"C_bb", c.params.C_bb},
                   {"epsilon", c.params.epsilon}};
    j["initial"] = {{"kind", c.initial.kind},           {"r0", c.initial.r0},         {"b0", c.initial.b0},
                    {"amplitude", c.initial.amplitude}, {"mode_x", c.initial.mode_x}, {"mode_y", c.initial.mode_y},
                    {"blue", c.initial.blue},           {"seed", c.initial.seed}};
    j["stability"] = {{"xi_max", c.stability.xi_max}, {"n_xi", c.stability.n_xi}};
    j["steady"] = {{"k", c.steady.k}, {"n", c.steady.n}, {"method", c.steady.method}};
    j["output_dir"] = c.output_dir;
    return j.dump(2);
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return config_from_json(os.str());
}

namespace {

SimConfig ex_base(double C_rr, int mode) {
    SimConfig c;
    c.n = 100;
    c.t_end = 1.0;
    c.output_stride = 1000;
    c.params.C_r = 0.5;
    c.params.C_rr = C_rr;
    c.params.epsilon = 0.05;
    c.params.dt = 1e-4;
    c.initial.r0 = 0.3;
    c.initial.amplitude = 0.02;
    c.initial.mode_x = mode;
    return c;
}

SimConfig integro(double C_rr) {
    SimConfig c = ex_base(C_rr, 3);
    c.model = ModelKind::NonlocalIntegro;
    c.n = 500;
    c.params.C_r = 1.0;
    c.stability.xi_max = 50.0;
    return c;
}

std::vector<Preset> make_presets() {
    std::vector<Preset> out;
    auto add = [&](std::string name, std::string description, SimConfig c) {
        c.name = name;
        c.output_dir = "out/" + name;
        out.push_back({std::move(name), std::move(description), std::move(c)});
    };
    add("ex1", "1D local model, C_rr=2: sin(4 pi x) perturbation of r0=0.3 decays", ex_base(2.0, 2));
    add("ex2-mode3", "1D local model, C_rr=10: mode 3 lies below the threshold 3.34 and grows", ex_base(10.0, 3));
    add("ex2-mode4", "1D local model, C_rr=10: mode 4 lies above the threshold 3.34 and decays", ex_base(10.0, 4));
    {
        SimConfig c = ex_base(10.0, 0);
        c.initial.kind = "random";
        c.initial.amplitude = 0.01;
        c.t_end = 6.0;
        c.output_stride = 100;
        add("ex2-random", "1D local model, C_rr=10: random perturbation of amplitude 0.01 forms a period-two pattern", c);
    }
    {
        SimConfig c = ex_base(10.0, 0);
        c.initial.kind = "random";
        c.initial.amplitude = 0.01;
        c.n = 200;
        c.params.epsilon = 0.02;
        c.params.dt = 2e-5;
        c.t_end = 20.0;
        c.output_stride = 10000;
        add("coarsening", "1D local model, C_rr=10, eps=0.02: many bumps form and merge over long times", c);
    }
    {
        SimConfig c;
        c.dimension = 2;
        c.n = 70;
        c.t_end = 10.0;
        c.output_stride = 5000;
        c.params = {0.1, 0.1, 10.0, 5.0, 5.0, 10.0, 0.1, 1e-4};
        c.initial.r0 = 0.3;
        c.initial.b0 = 0.3;
        c.initial.amplitude = 0.02;
        c.initial.mode_x = 2;
        c.initial.mode_y = 2;
        c.initial.blue = "mirrored";
        c.stability.xi_max = 10.0;
        add("2d-segregation", "2D two-species local model on 70x70, r/b perturbed by -/+ 0.02 sin(4 pi x) cos(4 pi y)", c);
    }
    add("integro-crr4", "1D nonlocal-jump model, C_rr=4: mode 3 perturbation decays", integro(4.0));
    add("integro-crr5", "1D nonlocal-jump model, C_rr=5: mode 3 perturbation grows", integro(5.0));
    {
        SimConfig c = ex_base(10.0, 1);
        c.params.epsilon = 0.01;
        c.steady = {1, 2000, "both"};
        add("plateau", "1D single-species plateau steady state, C_rr=10, M=0.3, eps=0.01", c);
    }
    return out;
}

} // namespace

const std::vector<Preset>& presets() {
    static const std::vector<Preset> all = make_presets();
    return all;
}

SimConfig preset(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return p.config;
    throw ConfigError("unknown preset '" + name + "' (see --list-presets)");
}

SpeciesState initial_state(const SimConfig& c) {
    c.validate();
    const Grid grid(c.dimension, c.n);
    const auto& ic = c.initial;
    DensityField pert(grid, 0.0);
    if (ic.kind == "sine") {
        const double two_pi = 2.0 * std::numbers::pi;
        pert = DensityField::sample(grid, [&](double x, double y) {
            const double s = ic.amplitude * std::sin(two_pi * ic.mode_x * x);
            return c.dimension == 1 ? s : s * std::cos(two_pi * ic.mode_y * y);
        });
    } else if (ic.kind == "random") {
        std::mt19937_64 rng(ic.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::size_t i = 0; i < pert.size(); ++i) pert[i] = unit(rng);
        const double m = pert.mean();
        for (std::size_t i = 0; i < pert.size(); ++i) pert[i] = ic.amplitude * (pert[i] - m);
    }
    SpeciesState s{DensityField(grid, ic.r0), DensityField(grid, ic.b0)};
    const bool mirrored = ic.blue == "mirrored";
    if (mirrored && ic.b0 == 0.0) throw ConfigError("mirrored blue perturbation needs b0 > 0");
    for (std::size_t i = 0; i < pert.size(); ++i) {
        s.r[i] += pert[i];
        if (mirrored) s.b[i] -= pert[i];
    }
    return s;
}

} // namespace segregation
