#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sflab/config.hpp"
#include "sflab/errors.hpp"
#include "sflab/run.hpp"

using namespace sflab;
using namespace sflab::cli;

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("sflab_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Config config_of(std::initializer_list<std::pair<std::string, std::string>> kv) {
    Config c;
    for (const auto& [k, v] : kv) c.values[k] = v;
    return c;
}

} // namespace

TEST_CASE("config text parsing") {
    const auto c = parse_config_text("rho = 1\n# comment\n\nv = 0.5 # inline\nj = 3\n");
    CHECK(c.values.size() == 3);
    CHECK(c.get_double("rho") == 1.0);
    CHECK(c.get_double("v") == 0.5);
    CHECK(c.get_int("j") == 3);

    CHECK_THROWS_AS(parse_config_text("novalue\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("= 3\n"), ConfigError);
    CHECK_THROWS_AS(config_of({{"x", "abc"}}).get_double("x"), ConfigError);
    CHECK_THROWS_AS(config_of({{"x", "1.5"}}).get_int("x"), ConfigError);
    CHECK(config_of({{"r", "4..7"}}).get_range("r") == std::pair<int, int>{4, 7});
    CHECK(config_of({{"l", "1,2.5,3"}}).get_list("l").size() == 3);
}

TEST_CASE("serialize/parse round trip after validation") {
    const Config raw = config_of({{"rho", "1"}, {"v", "1"}, {"j", "2"}});
    const auto validated = validate_config(raw, "ness");
    const Config reparsed = parse_config_text(serialize_config(validated.config));
    CHECK(reparsed.values == validated.config.values);
    // validation is idempotent on its own output
    const auto again = validate_config(reparsed, "ness");
    CHECK(again.config.values == validated.config.values);
}

TEST_CASE("schema validation") {
    SUBCASE("unknown keys are rejected, not ignored") {
        CHECK_THROWS_AS(validate_config(config_of({{"rh0", "1"}}), "ness"), ConfigError);
        CHECK_THROWS_AS(validate_config(config_of({{"nodes", "64"}}), "ness"), ConfigError);
    }
    SUBCASE("unknown subcommand") {
        CHECK_THROWS_AS(validate_config({}, "bogus"), ConfigError);
    }
    SUBCASE("even N rejected for Girardeau runs") {
        CHECK_THROWS_AS(validate_config(config_of({{"N", "4"}}), "spectrum"), ConfigError);
        CHECK_THROWS_AS(validate_config(config_of({{"N-list", "3,4"}}), "sound"),
                        ConfigError);
    }
    SUBCASE("window defaults follow Proposition 1") {
        const auto vc = validate_config(config_of({{"rho", "1"}}), "metastability");
        CHECK(vc.config.get_double("c") == doctest::Approx(2.0 * 9.869604401089358));
        CHECK(vc.config.get_double("d") == doctest::Approx(3.141592653589793));
        CHECK(vc.config.get("tol") == "1e-12");
    }
    SUBCASE("prescription echo with warning") {
        const auto vc = validate_config(
            config_of({{"N", "3"}, {"L", "6.283185307179586"}, {"v", "0.9"}}), "spectrum");
        CHECK(vc.config.get_double("v-applied") == 0.0);
        REQUIRE(vc.warnings.size() == 1);
        CHECK(vc.warnings[0].find("off-lattice") != std::string::npos);
    }
    SUBCASE("malformed numerics surface as config errors") {
        CHECK_THROWS_AS(validate_config(config_of({{"rho", "one"}}), "ness"), ConfigError);
    }
    SUBCASE("coupling presets resolve to particle numbers") {
        const auto weak = validate_config(config_of({{"coupling", "weak"}}), "meissner");
        CHECK(weak.config.get_double("n-particles") == 0.001);
        CHECK_THROWS_AS(validate_config(config_of({{"coupling", "medium"}}), "meissner"),
                        ConfigError);
    }
}

TEST_CASE("exit codes") {
    std::ostringstream sink;
    SUBCASE("config error is 2") {
        CHECK(run_subcommand("ness", config_of({{"bogus", "1"}}), sink) == kExitConfig);
        CHECK(run_subcommand("nonesuch", {}, sink) == kExitConfig);
    }
    SUBCASE("budget overflow is 3") {
        const auto dir = fresh_dir("budget");
        const auto cfg = config_of({{"N", "7"}, {"budget", "2"}, {"out", dir.string()}});
        CHECK(run_subcommand("spectrum", cfg, sink) == kExitBudget);
    }
    SUBCASE("solver non-convergence is 4, outputs still written") {
        const auto dir = fresh_dir("nonconv");
        const auto cfg = config_of({{"n-particles", "300"}, {"max-iter", "2"},
                                    {"nodes", "128"}, {"B-ext", "0.001"},
                                    {"out", dir.string()}});
        CHECK(run_subcommand("meissner", cfg, sink) == kExitNonConvergence);
        CHECK(fs::exists(dir / "meissner_profile.csv"));
        CHECK(fs::exists(dir / "meissner_report.json"));
    }
    SUBCASE("success is 0") {
        const auto dir = fresh_dir("ok");
        const auto cfg = config_of({{"rho", "1"}, {"v", "1"}, {"j", "1"},
                                    {"L-sweep", "4..8"}, {"out", dir.string()}});
        CHECK(run_subcommand("ness", cfg, sink) == kExitOk);
        CHECK(fs::exists(dir / "ness.csv"));
        CHECK(fs::exists(dir / "ness_fit.csv"));
        CHECK(fs::exists(dir / "ness_manifest.json"));
    }
}

TEST_CASE("determinism: identical config, byte-identical tables") {
    std::ostringstream sink;
    const auto dir_a = fresh_dir("det_a");
    const auto dir_b = fresh_dir("det_b");
    auto cfg = [&](const fs::path& d) {
        return config_of({{"rho", "1"}, {"v", "1"}, {"j", "3"}, {"L-sweep", "4..24"},
                          {"out", d.string()}});
    };
    REQUIRE(run_subcommand("ness", cfg(dir_a), sink) == kExitOk);
    REQUIRE(run_subcommand("ness", cfg(dir_b), sink) == kExitOk);
    CHECK(slurp(dir_a / "ness.csv") == slurp(dir_b / "ness.csv"));
    CHECK(slurp(dir_a / "ness_fit.csv") == slurp(dir_b / "ness_fit.csv"));

    const auto dir_c = fresh_dir("det_c");
    const auto dir_d = fresh_dir("det_d");
    auto kms_cfg = [&](const fs::path& d) {
        return config_of({{"demo", "all"}, {"out", d.string()}});
    };
    REQUIRE(run_subcommand("kms", kms_cfg(dir_c), sink) == kExitOk);
    REQUIRE(run_subcommand("kms", kms_cfg(dir_d), sink) == kExitOk);
    CHECK(slurp(dir_c / "kms_report.json") == slurp(dir_d / "kms_report.json"));
}

TEST_CASE("manifest replay reproduces the run") {
    std::ostringstream sink;
    const auto dir = fresh_dir("replay_src");
    const auto cfg = config_of({{"N", "5"}, {"v", "1"}, {"out", dir.string()}});
    REQUIRE(run_subcommand("spectrum", cfg, sink) == kExitOk);

    const auto dir2 = fresh_dir("replay_dst");
    REQUIRE(replay_manifest((dir / "spectrum_manifest.json").string(), dir2.string(),
                            sink) == kExitOk);
    CHECK(slurp(dir / "spectrum.csv") == slurp(dir2 / "spectrum.csv"));

    CHECK(replay_manifest("/nonexistent/manifest.json", "", sink) == kExitConfig);
}

TEST_CASE("CSV output shape") {
    std::ostringstream sink;
    const auto dir = fresh_dir("csvshape");
    const auto cfg = config_of({{"rho", "1"}, {"N-list", "3,5"}, {"out", dir.string()}});
    REQUIRE(run_subcommand("sound", cfg, sink) == kExitOk);
    const std::string body = slurp(dir / "sound.csv");
    CHECK(body.rfind("N,L,c_s_dispersion,", 0) == 0);
    CHECK(body.find("nan") == std::string::npos);
    CHECK(body.find("\r") == std::string::npos);   // LF endings only
    // 2 data rows + header
    CHECK(std::count(body.begin(), body.end(), '\n') == 3);
}

TEST_CASE("output directory precedence: flag beats environment") {
    std::ostringstream sink;
    const auto env_dir = fresh_dir("env_dir");
    const auto flag_dir = fresh_dir("flag_dir");
    setenv("SFLAB_OUTDIR", env_dir.string().c_str(), 1);
    const auto with_flag = config_of({{"rho", "1"}, {"N-list", "3"},
                                      {"out", flag_dir.string()}});
    REQUIRE(run_subcommand("sound", with_flag, sink) == kExitOk);
    CHECK(fs::exists(flag_dir / "sound.csv"));
    CHECK(!fs::exists(env_dir / "sound.csv"));

    const auto no_flag = config_of({{"rho", "1"}, {"N-list", "3"}});
    REQUIRE(run_subcommand("sound", no_flag, sink) == kExitOk);
    CHECK(fs::exists(env_dir / "sound.csv"));
    unsetenv("SFLAB_OUTDIR");
}

TEST_CASE("extrapolate subcommand reads (L,value) tables") {
    std::ostringstream sink;
    const auto dir = fresh_dir("extrap");
    const auto input = dir / "series.csv";
    {
        std::ofstream out(input);
        out << "L,value\n";
        for (double box : {10.0, 20.0, 40.0, 80.0})
            out << box << "," << (1.5 + 12.0 / box) << "\n";
    }
    const auto cfg = config_of({{"input", input.string()}, {"out", dir.string()}});
    REQUIRE(run_subcommand("extrapolate", cfg, sink) == kExitOk);
    const std::string body = slurp(dir / "extrapolate_report.json");
    CHECK(body.find("\"limit\": 1.5") != std::string::npos);

    CHECK(run_subcommand("extrapolate",
                         config_of({{"input", "/nope.csv"}, {"out", dir.string()}}),
                         sink) == kExitConfig);
}
