#include "regulata/regulata.h"

#include <exception>
#include <new>
#include <string>

#include "regulata/scenario.hpp"

struct regulata_scenario {
    regulata::ScenarioConfig config;
    std::string kind;
};

struct regulata_result {
    regulata::RunResult run;
    std::vector<std::string> columns;
};

struct regulata_verify_report {
    std::vector<regulata::VerifyCheck> checks;
    std::string table;
};

namespace {

thread_local std::string last_error;

regulata_status map_code(regulata::ErrorCode code) {
    using regulata::ErrorCode;
    switch (code) {
    case ErrorCode::ShapeMismatch: return REGULATA_E_SHAPE_MISMATCH;
    case ErrorCode::InvalidArgument: return REGULATA_E_INVALID_ARGUMENT;
    case ErrorCode::HurwitzViolation: return REGULATA_E_HURWITZ_VIOLATION;
    case ErrorCode::SingularXi: return REGULATA_E_SINGULAR_XI;
    case ErrorCode::NoUniqueSolution: return REGULATA_E_NO_UNIQUE_SOLUTION;
    case ErrorCode::Singular: return REGULATA_E_SINGULAR;
    case ErrorCode::ConvergenceFailure: return REGULATA_E_CONVERGENCE_FAILURE;
    case ErrorCode::ComplexPairingFailure: return REGULATA_E_COMPLEX_PAIRING;
    case ErrorCode::StepUnderflow: return REGULATA_E_STEP_UNDERFLOW;
    case ErrorCode::NonFiniteState: return REGULATA_E_NON_FINITE_STATE;
    case ErrorCode::WindowTooShort: return REGULATA_E_WINDOW_TOO_SHORT;
    case ErrorCode::ConfigError: return REGULATA_E_CONFIG;
    case ErrorCode::VerificationFailure: return REGULATA_E_VERIFICATION_FAILURE;
    case ErrorCode::IoError: return REGULATA_E_IO;
    }
    return REGULATA_E_INTERNAL;
}

regulata_status set_error(regulata_status status, const std::string& what) {
    last_error = what;
    return status;
}

// Runs body, translating exceptions into status codes.
template <typename F>
regulata_status guarded(F&& body) {
    try {
        last_error.clear();
        body();
        return REGULATA_OK;
    } catch (const regulata::Error& e) {
        return set_error(map_code(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(REGULATA_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(REGULATA_E_INTERNAL, e.what());
    }
}

regulata_status finish_scenario(regulata::ScenarioConfig cfg, regulata_scenario** out) {
    auto* s = new regulata_scenario{std::move(cfg), ""};
    s->kind = regulata::to_string(s->config.kind);
    *out = s;
    return REGULATA_OK;
}

} // namespace

extern "C" {

const char* regulata_version(void) { return "1.0.0"; }

const char* regulata_status_string(regulata_status status) {
    switch (status) {
    case REGULATA_OK: return "ok";
    case REGULATA_E_NULL_ARGUMENT: return "null argument";
    case REGULATA_E_SHAPE_MISMATCH: return "shape mismatch";
    case REGULATA_E_INVALID_ARGUMENT: return "invalid argument";
    case REGULATA_E_HURWITZ_VIOLATION: return "Hurwitz violation";
    case REGULATA_E_SINGULAR_XI: return "singular Xi";
    case REGULATA_E_NO_UNIQUE_SOLUTION: return "no unique solution";
    case REGULATA_E_SINGULAR: return "singular system";
    case REGULATA_E_CONVERGENCE_FAILURE: return "convergence failure";
    case REGULATA_E_COMPLEX_PAIRING: return "complex pairing failure";
    case REGULATA_E_STEP_UNDERFLOW: return "step underflow";
    case REGULATA_E_NON_FINITE_STATE: return "non-finite state";
    case REGULATA_E_WINDOW_TOO_SHORT: return "window too short";
    case REGULATA_E_CONFIG: return "configuration error";
    case REGULATA_E_VERIFICATION_FAILURE: return "verification failure";
    case REGULATA_E_IO: return "I/O error";
    case REGULATA_E_OUT_OF_RANGE: return "index out of range";
    case REGULATA_E_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* regulata_last_error(void) { return last_error.c_str(); }

regulata_status regulata_scenario_load(const char* path, regulata_scenario** out) {
    if (!path || !out) return set_error(REGULATA_E_NULL_ARGUMENT, "regulata_scenario_load: null argument");
    *out = nullptr;
    return guarded([&] { finish_scenario(regulata::load_scenario(path), out); });
}

regulata_status regulata_scenario_parse(const char* json_text, regulata_scenario** out) {
    if (!json_text || !out) return set_error(REGULATA_E_NULL_ARGUMENT, "regulata_scenario_parse: null argument");
    *out = nullptr;
    return guarded([&] { finish_scenario(regulata::parse_scenario(json_text), out); });
}

void regulata_scenario_free(regulata_scenario* scenario) { delete scenario; }

const char* regulata_scenario_name(const regulata_scenario* scenario) {
    return scenario ? scenario->config.name.c_str() : "";
}

const char* regulata_scenario_kind(const regulata_scenario* scenario) {
    return scenario ? scenario->kind.c_str() : "";
}

const char* regulata_scenario_output_dir(const regulata_scenario* scenario) {
    return scenario ? scenario->config.output_dir.c_str() : "";
}

regulata_status regulata_run(const regulata_scenario* scenario, regulata_result** out) {
    if (!scenario || !out) return set_error(REGULATA_E_NULL_ARGUMENT, "regulata_run: null argument");
    *out = nullptr;
    return guarded([&] {
        auto* r = new regulata_result{regulata::run_scenario(scenario->config), {}};
        r->columns.emplace_back("t");
        for (const auto& n : r->run.trajectory.state_names) r->columns.push_back(n);
        for (const auto& n : r->run.trajectory.derived_names) r->columns.push_back(n);
        *out = r;
    });
}

void regulata_result_free(regulata_result* result) { delete result; }

regulata_status regulata_result_write(const regulata_result* result, const char* out_dir) {
    if (!result || !out_dir) return set_error(REGULATA_E_NULL_ARGUMENT, "regulata_result_write: null argument");
    return guarded([&] { regulata::write_artifacts(result->run, out_dir); });
}

size_t regulata_result_rows(const regulata_result* result) {
    return result ? result->run.trajectory.size() : 0;
}

size_t regulata_result_columns(const regulata_result* result) { return result ? result->columns.size() : 0; }

const char* regulata_result_column_name(const regulata_result* result, size_t column) {
    if (!result || column >= result->columns.size()) return nullptr;
    return result->columns[column].c_str();
}

regulata_status regulata_result_value(const regulata_result* result, size_t row, size_t column, double* out) {
    if (!result || !out) return set_error(REGULATA_E_NULL_ARGUMENT, "regulata_result_value: null argument");
    const auto& traj = result->run.trajectory;
    if (row >= traj.size() || column >= result->columns.size()) {
        return set_error(REGULATA_E_OUT_OF_RANGE, "regulata_result_value: index out of range");
    }
    if (column == 0) {
        *out = traj.times[row];
    } else if (column - 1 < traj.states[row].size()) {
        *out = traj.states[row][column - 1];
    } else {
        *out = traj.derived[row][column - 1 - traj.states[row].size()];
    }
    return REGULATA_OK;
}

const char* regulata_result_report(const regulata_result* result) {
    return result ? result->run.report_json.c_str() : "";
}

regulata_status regulata_verify(const regulata_scenario* scenario, uint64_t seed, regulata_verify_report** out) {
    if (!scenario || !out) return set_error(REGULATA_E_NULL_ARGUMENT, "regulata_verify: null argument");
    *out = nullptr;
    return guarded([&] {
        auto* r = new regulata_verify_report{regulata::verify_scenario(scenario->config, seed), {}};
        r->table = regulata::format_verify_table(r->checks);
        *out = r;
    });
}

void regulata_verify_free(regulata_verify_report* report) { delete report; }

size_t regulata_verify_count(const regulata_verify_report* report) { return report ? report->checks.size() : 0; }

int regulata_verify_passed(const regulata_verify_report* report, size_t index) {
    return report && index < report->checks.size() && report->checks[index].passed ? 1 : 0;
}

const char* regulata_verify_name(const regulata_verify_report* report, size_t index) {
    if (!report || index >= report->checks.size()) return nullptr;
    return report->checks[index].name.c_str();
}

const char* regulata_verify_detail(const regulata_verify_report* report, size_t index) {
    if (!report || index >= report->checks.size()) return nullptr;
    return report->checks[index].detail.c_str();
}

int regulata_verify_all_passed(const regulata_verify_report* report) {
    if (!report) return 0;
    for (const auto& c : report->checks)
        if (!c.passed) return 0;
    return 1;
}

const char* regulata_verify_table(const regulata_verify_report* report) {
    return report ? report->table.c_str() : "";
}

} // extern "C"
