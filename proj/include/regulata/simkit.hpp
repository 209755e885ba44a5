#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "regulata/matcore.hpp"

namespace regulata {

using RhsFunction = std::function<void(double t, std::span<const double> x, std::span<double> dx)>;

enum class IntegrationMethod {
    Rk4Fixed,
    Rk45Adaptive,         // Dormand-Prince 5(4)
    Rosenbrock23Adaptive, // L-stable linearly implicit 2(3), for the high-gain flows
};

const char* to_string(IntegrationMethod m) noexcept;
IntegrationMethod parse_integration_method(const std::string& name);

struct IntegratorConfig {
    IntegrationMethod method = IntegrationMethod::Rk4Fixed;
    double dt = 1e-3;              // fixed step
    double abs_tol = 1e-9;         // adaptive
    double rel_tol = 1e-7;
    double dt_min = 1e-7;
    double dt_max = 1e-2;
    double t_start = 0.0;
    double t_end = 1.0;
    double sample_interval = 1e-2; // recording grid
    /// Times where the right-hand side may switch; stages of the step that
    /// ends on a breakpoint see its left limit.
    std::vector<double> breakpoints;

    void validate() const;
};

struct IntegrationStats {
    std::size_t steps = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evaluations = 0;
    std::size_t jacobian_evaluations = 0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<std::string> state_names;
    std::vector<std::string> derived_names;
    std::vector<Vector> derived;   // per sample, aligned with times
    IntegrationStats stats;

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    /// Column of a derived signal by name; throws InvalidArgument if unknown.
    [[nodiscard]] std::vector<double> derived_column(const std::string& name) const;
    [[nodiscard]] std::vector<double> state_column(std::size_t index) const;
};

/// Integrates x' = rhs(t, x) from cfg.t_start to cfg.t_end and records the
/// state on the sampling grid. Throws StepUnderflow or NonFiniteState.
Trajectory integrate(const RhsFunction& rhs, Vector x0, const IntegratorConfig& cfg);

struct ConvergenceReport {
    double settle_time = 0.0;  // first time after which the signal stays below threshold; NaN if never
    double exp_rate = 0.0;     // least-squares slope of log(signal) on the window
    double final_error = 0.0;
};

/// Fits log(max(signal, 1e-14)) ~ c + rate * t on [window_start, window_end].
/// Throws WindowTooShort with fewer than three samples in the window.
ConvergenceReport fit_exponential_rate(std::span<const double> times, std::span<const double> signal,
                                       double window_start, double window_end,
                                       double settle_threshold = 1e-3);

/// Root-mean-square of signal on [t0, t1] from uniformly sampled data.
double rms_over(std::span<const double> times, std::span<const double> signal, double t0, double t1);

} // namespace regulata
