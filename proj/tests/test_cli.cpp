#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "commands.hpp"
#include "oracles.hpp"
#include "segregation/diagnostics.hpp"
#include "segregation/errors.hpp"

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

using namespace segregation;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("segsim_" + tag + "_" + std::to_string(::getpid()))) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

// Runs the CLI binary; stdout and stderr go to files in dir.
int segsim(const std::string& args, const fs::path& dir) {
    const std::string cmd = std::string(SEGSIM_PATH) + " " + args + " >" + (dir / "stdout.txt").string() + " 2>" +
                            (dir / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> tree(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
    return files;
}

} // namespace

TEST_CASE("config round-trips through JSON") {
    for (const auto& p : presets()) {
        const std::string text = config_to_json(p.config);
        const SimConfig back = config_from_json(text);
        CHECK(config_to_json(back) == text);
        CHECK(back.params.epsilon == p.config.params.epsilon);
        CHECK(back.params.dt == p.config.params.dt);
        CHECK(back.initial.seed == p.config.initial.seed);
        CHECK(back.n == p.config.n);
    }
    SimConfig c = preset("ex2-random");
    c.params.C_rb = 0.1 + 0.2;  // not exactly representable in short decimal form
    c.initial.seed = 18446744073709551615ull;
    const SimConfig back = config_from_json(config_to_json(c));
    CHECK(back.params.C_rb == c.params.C_rb);
    CHECK(back.initial.seed == c.initial.seed);
}

TEST_CASE("config rejects unknown keys and bad values") {
    CHECK_THROWS_AS(config_from_json(R"({"name":"x","bogus":1})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"params":{"C_zz":1}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"n":"many"})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"model":"spectral"})"), ConfigError);
    CHECK_THROWS_AS(config_from_json("{not json"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"n":2})"), ConfigError);
    CHECK_THROWS_AS(preset("no-such-preset"), ConfigError);
    const SimConfig d = config_from_json("{}");
    CHECK(config_to_json(d) == config_to_json(SimConfig{}));
}

TEST_CASE("presets are listed one per line") {
    TempDir tmp("list");
    REQUIRE(segsim("--list-presets", tmp.path) == 0);
    std::istringstream is(slurp(tmp.path / "stdout.txt"));
    std::vector<std::string> listed;
    for (std::string line; std::getline(is, line);) listed.push_back(line.substr(0, line.find('\t')));
    std::vector<std::string> names;
    for (const auto& p : presets()) names.push_back(p.name);
    CHECK(listed == names);
    CHECK(std::set<std::string>(names.begin(), names.end()).size() == names.size());
    for (const char* expected : {"ex1", "ex2-mode3", "ex2-mode4", "ex2-random", "coarsening", "2d-segregation",
                                 "integro-crr4", "integro-crr5", "plateau"})
        CHECK(std::find(names.begin(), names.end(), expected) != names.end());
}

TEST_CASE("simulate ex1 decays and records its config") {
    TempDir tmp("ex1");
    const fs::path out = tmp.path / "run";
    REQUIRE(segsim("simulate --preset ex1 --out " + out.string(), tmp.path) == 0);
    const auto s = read_json(out / "summary.json");
    CHECK(s["decayed"] == true);
    CHECK(s["name"] == "ex1");
    CHECK(std::abs(s["mass_drift_r"].get<double>()) <= 1e-12);
    const SimConfig c = load_config((out / "config.json").string());
    CHECK(config_to_json(c) == config_to_json([&] {
              SimConfig p = preset("ex1");
              p.output_dir = out.string();
              return p;
          }()));
    CHECK(fs::exists(out / "entropy.csv"));
    CHECK(fs::exists(out / "r_000000000.csv"));
    CHECK(fs::exists(out / "r_000010000.csv"));
}

TEST_CASE("simulate integro-crr5 does not decay") {
    SimConfig c = preset("integro-crr5");
    const auto r = cli::run_simulation(c, std::nullopt);
    const auto s = json::parse(cli::simulation_summary_json(c, r));
    CHECK(s["decayed"] == false);
    CHECK(r.final_amplitude > r.initial_amplitude);
    CHECK(r.mass_drift_r <= 1e-12);
}

TEST_CASE("t_end = 0 writes the initial state") {
    TempDir tmp("t0");
    for (const char* name : {"ex2-random", "2d-segregation"}) {
        SimConfig c = preset(name);
        c.t_end = 0.0;
        const fs::path out = tmp.path / name;
        REQUIRE(cli::cmd_simulate(c, out) == 0);
        const auto init = initial_state(c);
        std::ifstream in(out / "r_000000000.csv");
        const auto snap = read_csv(in);
        CHECK(snap.t == 0.0);
        CHECK(oracle::max_abs_diff(snap.field, init.r) == 0.0);
        if (init.has_blue()) {
            std::ifstream inb(out / "b_000000000.csv");
            CHECK(oracle::max_abs_diff(read_csv(inb).field, init.b) == 0.0);
        }
    }
}

TEST_CASE("stability command") {
    TempDir tmp("stab");
    REQUIRE(segsim("stability --preset ex2-mode3 --out " + (tmp.path / "ex2").string(), tmp.path) == 0);
    const auto j = read_json(tmp.path / "ex2" / "stability.json");
    CHECK(j["threshold"].get<double>() == doctest::Approx(3.34).epsilon(0.01 / 3.34));
    CHECK(j["dominant_mode"].get<double>() == doctest::Approx(2.13).epsilon(0.01 / 2.13));
    CHECK(fs::exists(tmp.path / "ex2" / "dispersion.csv"));
    REQUIRE(segsim("stability --preset ex1 --out " + (tmp.path / "ex1").string(), tmp.path) == 0);
    CHECK(read_json(tmp.path / "ex1" / "stability.json")["threshold"].is_null());
}

TEST_CASE("steady command") {
    TempDir tmp("steady");
    const fs::path bad = tmp.path / "bad";
    CHECK(segsim("steady --preset plateau --crr 3 --out " + bad.string(), tmp.path) == 2);
    CHECK(slurp(tmp.path / "stderr.txt").find("C_rr must exceed 4") != std::string::npos);
    const auto err = read_json(bad / "error.json");
    CHECK(err["error"] == "ConfigError");

    const fs::path one = tmp.path / "k1";
    REQUIRE(segsim("steady --preset plateau --out " + one.string(), tmp.path) == 0);
    const auto meta = read_json(one / "steady_bvp.json");
    CHECK(meta["r_low"].get<double>() > 0.0);
    CHECK(meta["r_high"].get<double>() < 1.0);
    CHECK(fs::exists(one / "profile_fixed_point.csv"));
    CHECK(fs::exists(one / "steady_fixed_point.json"));

    const fs::path two = tmp.path / "k2";
    REQUIRE(segsim("steady --preset plateau --k 2 --method bvp --out " + two.string(), tmp.path) == 0);
    std::ifstream in(two / "profile_bvp.csv");
    const auto snap = read_csv(in);
    CHECK(dominant_mode(snap.field).mx == 2);
    CHECK(bump_count(snap.field) == 2);
}

TEST_CASE("bump counting on snapshot files") {
    TempDir tmp("bumps");
    const Grid g(1, 200);
    auto save = [&](const std::string& name, const DensityField& f) {
        std::ofstream os(tmp.path / name);
        write_csv(os, f, 0.0);
        return tmp.path / name;
    };
    CHECK(cli::cmd_bump_count(save("flat.csv", DensityField(g, 0.3))) == 0);
    const auto two = DensityField::sample(g, [](double x, double) { return 0.3 + 0.1 * std::sin(4 * std::numbers::pi * x); });
    CHECK(cli::cmd_bump_count(save("two.csv", two)) == 2);
    const auto blob = DensityField::sample(Grid(2, 40), [](double x, double y) {
        return 0.3 + 0.1 * std::sin(2 * std::numbers::pi * x) * std::sin(2 * std::numbers::pi * y);
    });
    CHECK(cli::cmd_bump_count(save("blob.csv", blob)) == 2);
    REQUIRE(segsim("bumps " + (tmp.path / "two.csv").string(), tmp.path) == 0);
    CHECK(slurp(tmp.path / "stdout.txt") == (tmp.path / "two.csv").string() + "\t2\n");
}

TEST_CASE("coarsening diagnostic is non-increasing on a short run") {
    SimConfig c = preset("coarsening");
    c.t_end = 2.0;
    const auto r = cli::run_simulation(c, std::nullopt);
    REQUIRE(r.bump_counts.size() >= 3);
    // Skip the noisy initial datum; from the first recorded time on the count only drops.
    for (std::size_t i = 2; i < r.bump_counts.size(); ++i) CHECK(r.bump_counts[i] <= r.bump_counts[i - 1]);
}

TEST_CASE("identical config gives byte-identical outputs") {
    TempDir tmp("det");
    const std::string args = "simulate --preset ex2-random --t-end 0.5 --out ";
    REQUIRE(segsim(args + (tmp.path / "a").string() + " --seed 7", tmp.path) == 0);
    REQUIRE(segsim(args + (tmp.path / "b").string() + " --seed 7", tmp.path) == 0);
    auto a = tree(tmp.path / "a"), b = tree(tmp.path / "b");
    CHECK(a.size() > 3);
    // config.json records the output directory, which differs by construction.
    a.erase("config.json");
    b.erase("config.json");
    CHECK(a == b);
    REQUIRE(segsim(args + (tmp.path / "c").string() + " --seed 8", tmp.path) == 0);
    CHECK(tree(tmp.path / "c").at("r_000000000.csv") != a.at("r_000000000.csv"));
    CHECK(read_json(tmp.path / "a" / "summary.json")["seed"] == 7);
}

TEST_CASE("exit codes") {
    TempDir tmp("exit");
    CHECK(segsim("simulate --preset no-such-preset --out " + (tmp.path / "x").string(), tmp.path) == 2);
    CHECK(segsim("simulate --no-such-flag", tmp.path) == 2);
    CHECK(segsim("simulate --config " + (tmp.path / "missing.json").string(), tmp.path) == 2);

    SimConfig c = preset("ex1");
    c.params.dt = 0.5;
    c.output_dir = (tmp.path / "big").string();
    std::ofstream(tmp.path / "big.json") << config_to_json(c);
    CHECK(segsim("simulate --config " + (tmp.path / "big.json").string(), tmp.path) == 3);
    const auto err = read_json(tmp.path / "big" / "error.json");
    CHECK(err["error"] == "TimeStepTooLarge");
    CHECK(json::parse(slurp(tmp.path / "stderr.txt"))["error"] == "TimeStepTooLarge");
}

TEST_CASE("--jobs fans presets out into separate directories") {
    TempDir tmp("jobs");
    const std::string common = " --t-end 0.2 --out ";
    REQUIRE(segsim("simulate --preset ex1 --preset ex2-mode4 --preset ex2-mode3 --jobs 3" + common +
                       (tmp.path / "par").string(),
                   tmp.path) == 0);
    for (const char* name : {"ex1", "ex2-mode4", "ex2-mode3"}) {
        REQUIRE(segsim(std::string("simulate --preset ") + name + common + (tmp.path / "seq" / name).string(), tmp.path) == 0);
        auto par = tree(tmp.path / "par" / name), seq = tree(tmp.path / "seq" / name);
        par.erase("config.json");
        seq.erase("config.json");
        CHECK(par == seq);
        CHECK(par.count("summary.json") == 1);
    }
}
