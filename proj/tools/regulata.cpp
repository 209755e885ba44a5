// regulata: scenario runner over the C interface.
//
//   regulata run <config>... [--out DIR] [--jobs K]
//   regulata verify <config>... [--seed N]
//
// Exit codes: 0 ok, 2 configuration, 3 simulation, 4 verification.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "regulata/regulata.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSimulation = 3;
constexpr int kExitVerification = 4;

std::mutex io_mutex;

void report_error(const std::string& config, const char* stage, regulata_status status) {
    std::lock_guard<std::mutex> lock(io_mutex);
    std::fprintf(stderr, "regulata: %s: %s failed (%s): %s\n", config.c_str(), stage,
                 regulata_status_string(status), regulata_last_error());
}

struct ScenarioHandle {
    regulata_scenario* ptr = nullptr;
    ~ScenarioHandle() { regulata_scenario_free(ptr); }
};

struct ResultHandle {
    regulata_result* ptr = nullptr;
    ~ResultHandle() { regulata_result_free(ptr); }
};

struct VerifyHandle {
    regulata_verify_report* ptr = nullptr;
    ~VerifyHandle() { regulata_verify_free(ptr); }
};

std::filesystem::path output_dir(const std::string& flag, const regulata_scenario* s, bool several) {
    std::filesystem::path base;
    if (!flag.empty()) {
        base = flag;
    } else if (const char* env = std::getenv("REGULATA_OUT"); env && *env) {
        base = env;
    } else {
        return regulata_scenario_output_dir(s);
    }
    return several ? base / regulata_scenario_name(s) : base;
}

int run_one(const std::string& config, const std::string& out_flag, bool several) {
    ScenarioHandle scenario;
    if (auto st = regulata_scenario_load(config.c_str(), &scenario.ptr); st != REGULATA_OK) {
        report_error(config, "load", st);
        return kExitConfig;
    }
    ResultHandle result;
    if (auto st = regulata_run(scenario.ptr, &result.ptr); st != REGULATA_OK) {
        report_error(config, "simulation", st);
        return st == REGULATA_E_CONFIG ? kExitConfig : kExitSimulation;
    }
    const auto dir = output_dir(out_flag, scenario.ptr, several);
    if (auto st = regulata_result_write(result.ptr, dir.string().c_str()); st != REGULATA_OK) {
        report_error(config, "writing artifacts", st);
        return kExitSimulation;
    }
    std::lock_guard<std::mutex> lock(io_mutex);
    std::printf("%s: %zu samples -> %s\n", regulata_scenario_name(scenario.ptr),
                regulata_result_rows(result.ptr), dir.string().c_str());
    return 0;
}

int verify_one(const std::string& config, std::uint64_t seed) {
    ScenarioHandle scenario;
    if (auto st = regulata_scenario_load(config.c_str(), &scenario.ptr); st != REGULATA_OK) {
        report_error(config, "load", st);
        return kExitConfig;
    }
    VerifyHandle report;
    if (auto st = regulata_verify(scenario.ptr, seed, &report.ptr); st != REGULATA_OK) {
        report_error(config, "verify", st);
        return kExitVerification;
    }
    const bool ok = regulata_verify_all_passed(report.ptr) != 0;
    std::lock_guard<std::mutex> lock(io_mutex);
    std::printf("%s (%s)\n%s", regulata_scenario_name(scenario.ptr), ok ? "all checks passed" : "FAILED",
                regulata_verify_table(report.ptr));
    return ok ? 0 : kExitVerification;
}

// Runs job(i) for every config on up to `jobs` threads; returns the worst exit code.
template <typename Job>
int for_each_config(const std::vector<std::string>& configs, unsigned jobs, Job job) {
    std::vector<int> codes(configs.size(), 0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) codes[i] = job(configs[i]);
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return *std::max_element(codes.begin(), codes.end());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonparametric learning output regulation: scenario runner"};
    app.require_subcommand(1);

    std::vector<std::string> configs;
    std::string out_flag;
    unsigned jobs = 1;
    std::uint64_t seed = 1;

    auto* run = app.add_subcommand("run", "Simulate scenarios and write CSV, SVG and report.json");
    run->add_option("configs", configs, "Scenario files")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_flag, "Output directory (overrides REGULATA_OUT and the config)");
    run->add_option("--jobs", jobs, "Scenarios to run concurrently")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "Seed for randomized checks (no effect on simulation)");

    auto* verify = app.add_subcommand("verify", "Run the algebraic self-checks of scenarios");
    verify->add_option("configs", configs, "Scenario files")->required()->check(CLI::ExistingFile);
    verify->add_option("--jobs", jobs, "Scenarios to check concurrently")->check(CLI::PositiveNumber);
    verify->add_option("--seed", seed, "Seed for the sampled generator states");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (run->parsed()) {
        const bool several = configs.size() > 1;
        return for_each_config(configs, jobs,
                               [&](const std::string& c) { return run_one(c, out_flag, several); });
    }
    return for_each_config(configs, jobs, [&](const std::string& c) { return verify_one(c, seed); });
}
