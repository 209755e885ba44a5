#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include <sys/wait.h>

#include "regulata/regulata.h"
#include "regulata/report.hpp"
#include "regulata/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kScenarios = REGULATA_SCENARIO_DIR;
const std::string kCli = REGULATA_CLI_PATH;

struct Outcome {
    int code;
    std::string out;
};

Outcome run_cli(const std::string& args) {
    const std::string cmd = "'" + kCli + "' " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("regulata_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

json load_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

fs::path write_config(const fs::path& dir, const std::string& name, const json& j) {
    const fs::path p = dir / (name + ".cfg");
    std::ofstream(p) << j.dump(2);
    return p;
}

// The bundled scenarios trimmed to a short horizon.
json short_config(const std::string& file, double t_end) {
    json j = load_json(kScenarios + "/" + file);
    j["t_end"] = t_end;
    j.erase("name");
    j.erase("rate_window_start");
    j.erase("rate_window_end");
    if (j.contains("t_on")) j["t_on"] = t_end / 2;
    return j;
}

json custom_lti_config() {
    return {{"kind", "custom-lti"},
            {"t_end", 2.0},
            {"method", "rk45-adaptive"},
            {"a", {4.0, 0.0}},
            {"v0", {1.0, 0.0}},
            {"m", {1.0, 4.0, 6.0, 4.0}},
            {"k1", 10.0},
            {"k2", 5.0},
            {"A", {{-1.0, 1.0}, {0.0, -2.0}}},
            {"B", {{0.0}, {1.0}}},
            {"P", {{1.0, 0.0}, {0.0, 0.0}}},
            {"C", {{1.0, 0.0}}},
            {"x0", {0.1, 0.0}}};
}

} // namespace

TEST_CASE("run writes the artifacts and exits 0") {
    const fs::path dir = scratch("run");
    const auto cfg = write_config(dir, "obs", short_config("example2_observer.cfg", 2.0));
    const auto r = run_cli("run '" + cfg.string() + "' --out '" + (dir / "out").string() + "'");
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "out" / "trajectory.csv"));
    CHECK(fs::exists(dir / "out" / "report.json"));
    CHECK(fs::exists(dir / "out" / "plots" / "omega.svg"));
    const json rep = load_json(dir / "out" / "report.json");
    CHECK(rep["scenario"] == "obs");
    CHECK(rep["status"] == "ok");
}

TEST_CASE("REGULATA_OUT and several configs") {
    const fs::path dir = scratch("env");
    const auto a = write_config(dir, "first", short_config("example2_observer.cfg", 1.0));
    const auto b = write_config(dir, "second", short_config("example2_observer.cfg", 1.0));
    ::setenv("REGULATA_OUT", (dir / "env_out").c_str(), 1);
    const auto r = run_cli("run '" + a.string() + "' '" + b.string() + "' --jobs 2");
    ::unsetenv("REGULATA_OUT");
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "env_out" / "first" / "report.json"));
    CHECK(fs::exists(dir / "env_out" / "second" / "report.json"));
}

TEST_CASE("configuration errors exit 2") {
    const fs::path dir = scratch("cfgerr");
    json neg = short_config("example2_observer.cfg", 1.0);
    neg["k1"] = -1.0;
    auto r = run_cli("run '" + write_config(dir, "neg", neg).string() + "' --out '" + dir.string() + "'");
    CHECK(r.code == 2);
    CHECK(r.out.find("k1") != std::string::npos);

    json unknown = short_config("example2_observer.cfg", 1.0);
    unknown["mu"] = 1e7;
    r = run_cli("run '" + write_config(dir, "unknown", unknown).string() + "'");
    CHECK(r.code == 2);

    json shape = short_config("example2_observer.cfg", 1.0);
    shape["m"] = {1.0, 2.0};
    r = run_cli("run '" + write_config(dir, "shape", shape).string() + "'");
    CHECK(r.code == 2);

    std::ofstream(dir / "broken.cfg") << "{ not json";
    r = run_cli("run '" + (dir / "broken.cfg").string() + "'");
    CHECK(r.code == 2);

    r = run_cli("run '" + (dir / "missing.cfg").string() + "'");
    CHECK(r.code == 2);

    // model-level problems found while building the loop are configuration errors too
    json hurwitz = short_config("example2_observer.cfg", 1.0);
    hurwitz["m"] = {1.0, 8.0, 28.0, 56.0, 70.0, 56.0, 28.0, -8.0};
    r = run_cli("run '" + write_config(dir, "hurwitz", hurwitz).string() + "' --out '" + dir.string() + "'");
    CHECK(r.code == 2);
}

TEST_CASE("simulation failures exit 3") {
    const fs::path dir = scratch("simerr");
    json j = short_config("example2_observer.cfg", 20.0);
    j["method"] = "rk4-fixed";
    j["dt"] = 0.05;  // far outside the stability region of k1 = 1e7
    j["sample_interval"] = 0.5;
    const auto r = run_cli("run '" + write_config(dir, "blowup", j).string() + "' --out '" + dir.string() + "'");
    CHECK(r.code == 3);
}

TEST_CASE("verify") {
    auto r = run_cli("verify '" + kScenarios + "/example2.cfg'");
    CHECK(r.code == 0);
    CHECK(r.out.find("Sylvester residual") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);

    const fs::path dir = scratch("verify");
    json rep = short_config("example2_observer.cfg", 1.0);
    rep["a"] = {16.0, 0.0, 8.0, 0.0};  // (s^2 + 4)^2: omega = 2 twice
    r = run_cli("verify '" + write_config(dir, "repeated", rep).string() + "'");
    CHECK(r.code == 4);
    CHECK(r.out.find("repeated eigenvalue") != std::string::npos);

    json nh = short_config("example2_observer.cfg", 1.0);
    nh["m"] = {1.0, 8.0, 28.0, 56.0, 70.0, 56.0, 28.0, -8.0};
    r = run_cli("verify '" + write_config(dir, "nonhurwitz", nh).string() + "'");
    CHECK(r.code == 4);
    CHECK(r.out.find("HurwitzViolation") != std::string::npos);

    r = run_cli("verify '" + kScenarios + "/example1.cfg' '" + kScenarios + "/example2_observer.cfg' --jobs 2 --seed 9");
    CHECK(r.code == 0);
}

TEST_CASE("CSV round trip is exact") {
    auto cfg = regulata::parse_scenario(short_config("example2_observer.cfg", 1.0).dump(), "roundtrip");
    cfg.emit_svg = false;
    const auto res = regulata::run_scenario(cfg);
    const fs::path dir = scratch("csv");
    regulata::write_artifacts(res, dir);
    const auto table = regulata::read_csv(dir / "trajectory.csv");
    const auto& traj = res.trajectory;
    REQUIRE(table.rows.size() == traj.size());
    REQUIRE(table.header.size() == 1 + traj.state_names.size() + traj.derived_names.size());
    CHECK(table.header.front() == "t");
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto& row = table.rows[k];
        CHECK(row[0] == traj.times[k]);
        for (std::size_t i = 0; i < traj.states[k].size(); ++i) CHECK(row[1 + i] == traj.states[k][i]);
        const std::size_t off = 1 + traj.states[k].size();
        for (std::size_t i = 0; i < traj.derived[k].size(); ++i) {
            const double want = traj.derived[k][i];
            if (std::isnan(want))
                CHECK(std::isnan(row[off + i]));
            else
                CHECK(row[off + i] == want);
        }
    }
    CHECK(regulata::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("report.json has the same top-level keys for every kind") {
    std::vector<json> configs{short_config("example1.cfg", 1.0), short_config("example2.cfg", 1.0),
                              short_config("example2_observer.cfg", 1.0), custom_lti_config()};
    std::set<std::string> reference;
    for (const auto& j : configs) {
        auto cfg = regulata::parse_scenario(j.dump());
        const json rep = json::parse(regulata::run_scenario(cfg).report_json);
        std::set<std::string> keys;
        for (const auto& item : rep.items()) keys.insert(item.key());
        if (reference.empty()) reference = keys;
        CHECK(keys == reference);
    }
    for (const char* k : {"scenario", "kind", "status", "final_errors", "rates", "settle_times",
                          "frequency_estimates", "metrics", "integrator"})
        CHECK(reference.count(k) == 1);
}

TEST_CASE("C interface") {
    CHECK(std::string(regulata_version()).size() > 0);
    CHECK(regulata_scenario_load(nullptr, nullptr) == REGULATA_E_NULL_ARGUMENT);

    regulata_scenario* s = nullptr;
    CHECK(regulata_scenario_parse("{\"kind\": \"nope\"}", &s) == REGULATA_E_CONFIG);
    CHECK(s == nullptr);
    CHECK(std::string(regulata_last_error()).size() > 0);

    const std::string text = custom_lti_config().dump();
    REQUIRE(regulata_scenario_parse(text.c_str(), &s) == REGULATA_OK);
    CHECK(std::string(regulata_scenario_kind(s)) == "custom-lti");
    CHECK(std::string(regulata_last_error()).empty());

    regulata_result* r = nullptr;
    REQUIRE(regulata_run(s, &r) == REGULATA_OK);
    CHECK(regulata_result_rows(r) == 201);
    CHECK(std::string(regulata_result_column_name(r, 0)) == "t");
    double t = -1.0;
    CHECK(regulata_result_value(r, 200, 0, &t) == REGULATA_OK);
    CHECK(t == 2.0);
    CHECK(regulata_result_value(r, 201, 0, &t) == REGULATA_E_OUT_OF_RANGE);
    CHECK(regulata_result_column_name(r, regulata_result_columns(r)) == nullptr);
    CHECK(json::parse(regulata_result_report(r))["kind"] == "custom-lti");

    const fs::path dir = scratch("capi");
    CHECK(regulata_result_write(r, dir.c_str()) == REGULATA_OK);
    CHECK(fs::exists(dir / "trajectory.csv"));

    regulata_verify_report* v = nullptr;
    REQUIRE(regulata_verify(s, 3, &v) == REGULATA_OK);
    CHECK(regulata_verify_count(v) > 4);
    CHECK(regulata_verify_all_passed(v) == 1);
    CHECK(std::string(regulata_verify_name(v, 0)).size() > 0);
    CHECK(std::string(regulata_verify_table(v)).find("PASS") != std::string::npos);

    regulata_verify_free(v);
    regulata_result_free(r);
    regulata_scenario_free(s);
}
