#include "commands.hpp"

#include "segregation/errors.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <iostream>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;
using namespace segregation;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
    std::string config_file;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<double> t_end;
    std::optional<double> epsilon;
    std::optional<double> crr;
    std::optional<int> k;
    std::optional<double> xi_max;
    std::optional<int> n_xi;
    std::optional<std::string> method;
};

SimConfig resolve(const std::string& preset_name, const Overrides& o) {
    SimConfig c;
    if (!o.config_file.empty()) c = load_config(o.config_file);
    else if (!preset_name.empty()) c = preset(preset_name);
    else throw ConfigError("give --preset or --config");
    if (o.seed) c.initial.seed = *o.seed;
    if (o.t_end) c.t_end = *o.t_end;
    if (o.epsilon) c.params.epsilon = *o.epsilon;
    if (o.crr) c.params.C_rr = *o.crr;
    if (o.k) c.steady.k = *o.k;
    if (o.xi_max) c.stability.xi_max = *o.xi_max;
    if (o.n_xi) c.stability.n_xi = *o.n_xi;
    if (o.method) c.steady.method = *o.method;
    if (!o.out.empty()) c.output_dir = o.out;
    c.validate();
    return c;
}

// Runs fn, reporting failures as JSON on stderr (and error.json in out when known).
// out is read at failure time, so fn may fill it in once the config is resolved.
template <class Fn>
int guarded(Fn&& fn, const fs::path& out = {}) {
    auto report = [&](const std::string& kind, const std::string& msg, int code) {
        const std::string js = cli::error_json(kind, msg);
        std::cerr << js << '\n';
        if (!out.empty()) {
            std::error_code ec;
            fs::create_directories(out, ec);
            std::ofstream(out / "error.json") << js << '\n';
        }
        return code;
    };
    try {
        return fn();
    } catch (const ConfigError& e) {
        return report("ConfigError", e.what(), kExitConfig);
    } catch (const NumericalError& e) {
        return report(e.kind(), e.what(), kExitNumerical);
    } catch (const std::exception& e) {
        return report("Error", e.what(), kExitNumerical);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Segregation dynamics simulator and stability toolkit"};
    app.require_subcommand(0, 1);
    bool list = false;
    app.add_flag("--list-presets", list, "List experiment presets and exit");

    Overrides o;
    std::vector<std::string> preset_names;
    std::string preset_name;
    int jobs = 1;
    std::vector<std::string> snapshots;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_file, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "Output directory");
        sub->add_option("--seed", o.seed, "Seed for random initial data");
        sub->add_option("--epsilon", o.epsilon, "Override kernel width epsilon");
        sub->add_option("--crr", o.crr, "Override C_rr");
    };

    auto* sim = app.add_subcommand("simulate", "Run a dynamics simulation");
    common(sim);
    sim->add_option("--preset", preset_names, "Preset name (repeatable)");
    sim->add_option("--t-end", o.t_end, "Override final time");
    sim->add_option("--jobs", jobs, "Worker threads for several presets")->check(CLI::PositiveNumber);

    auto* stab = app.add_subcommand("stability", "Linear stability scan of the constant state");
    common(stab);
    stab->add_option("--preset", preset_name, "Preset name");
    stab->add_option("--xi-max", o.xi_max, "Largest wavenumber scanned");
    stab->add_option("--n-xi", o.n_xi, "Number of scan points");

    auto* steady = app.add_subcommand("steady", "Single-species plateau steady state");
    common(steady);
    steady->add_option("--preset", preset_name, "Preset name");
    steady->add_option("--k", o.k, "Number of bumps");
    steady->add_option("--method", o.method, "bvp, fixed_point or both");

    auto* bumps = app.add_subcommand("bumps", "Count bumps in snapshot files");
    bumps->add_option("snapshots", snapshots, "Snapshot CSV files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (list) {
        for (const auto& p : presets()) std::cout << p.name << "\t" << p.description << '\n';
        return 0;
    }

    if (*sim) {
        if (preset_names.size() <= 1) {
            const std::string name = preset_names.empty() ? "" : preset_names.front();
            fs::path out = o.out;
            return guarded([&] {
                const SimConfig c = resolve(name, o);
                out = c.output_dir;
                return cli::cmd_simulate(c, c.output_dir);
            }, out);
        }
        // Several presets: isolated output directories, fanned out over threads.
        std::atomic<std::size_t> next{0};
        std::atomic<int> worst{0};
        std::mutex io;
        auto worker = [&] {
            for (std::size_t i; (i = next++) < preset_names.size();) {
                const std::string& name = preset_names[i];
                fs::path dir = o.out.empty() ? fs::path("out") / name : fs::path(o.out) / name;
                int code = guarded([&] {
                    Overrides local = o;
                    local.out = dir.string();
                    const SimConfig c = resolve(name, local);
                    const auto r = cli::run_simulation(c, dir);
                    std::lock_guard lock(io);
                    std::cout << name << ": final_amplitude=" << r.final_amplitude << " -> " << dir.string() << '\n';
                    return 0;
                }, dir);
                int prev = worst.load();
                while (code > prev && !worst.compare_exchange_weak(prev, code)) {}
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < std::min<int>(jobs, int(preset_names.size())); ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        return worst.load();
    }
    if (*stab) {
        fs::path out = o.out;
        return guarded([&] {
            const SimConfig c = resolve(preset_name, o);
            out = c.output_dir;
            return cli::cmd_stability(c, c.output_dir);
        }, out);
    }
    if (*steady) {
        fs::path out = o.out;
        return guarded([&] {
            const SimConfig c = resolve(preset_name, o);
            out = c.output_dir;
            return cli::cmd_steady(c, c.output_dir);
        }, out);
    }
    if (*bumps) {
        return guarded([&] {
            for (const auto& f : snapshots) std::cout << f << "\t" << cli::cmd_bump_count(f) << '\n';
            return 0;
        });
    }
    std::cout << app.help() << '\n';
    return 0;
}
