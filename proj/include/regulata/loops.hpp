#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "regulata/feedforward.hpp"
#include "regulata/imodel.hpp"
#include "regulata/plants.hpp"
#include "regulata/regulator.hpp"
#include "regulata/simkit.hpp"

namespace regulata {

/// A closed loop as one stacked ODE with named states and derived signals.
class ClosedLoop {
public:
    virtual ~ClosedLoop() = default;

    [[nodiscard]] virtual std::size_t dim() const = 0;
    [[nodiscard]] virtual Vector initial_state() const = 0;
    virtual void rhs(double t, std::span<const double> x, std::span<double> dx) const = 0;
    [[nodiscard]] virtual std::vector<std::string> state_names() const = 0;
    [[nodiscard]] virtual std::vector<std::string> derived_names() const = 0;
    /// Derived signals at a recorded sample; the control input is computed
    /// by the same routine the right-hand side uses.
    [[nodiscard]] virtual Vector derived(double t, std::span<const double> x) const = 0;
    [[nodiscard]] virtual std::vector<double> breakpoints() const { return {}; }
};

/// Integrates the loop and fills state and derived columns.
Trajectory simulate(const ClosedLoop& loop, IntegratorConfig cfg);

/// Output-feedback regulator: stack (x, v, eta, a_hat[, k_hat]).
struct RegulationLoopConfig {
    std::shared_ptr<const PlantModel> plant;
    Exosystem exo;
    InternalModelSpec spec;
    GainLaw gain;
    double k1 = 1.0;
    SaturationConfig sat;
    Vector x0;
    Vector eta0;            // defaults to zeros
    Vector a_hat0;          // defaults to zeros
    std::optional<CoeffVector> a_true;  // for the a_bar diagnostics
};

class RegulationLoop final : public ClosedLoop {
public:
    explicit RegulationLoop(RegulationLoopConfig cfg);

    [[nodiscard]] std::size_t dim() const override { return dim_; }
    [[nodiscard]] Vector initial_state() const override;
    void rhs(double t, std::span<const double> x, std::span<double> dx) const override;
    [[nodiscard]] std::vector<std::string> state_names() const override;
    [[nodiscard]] std::vector<std::string> derived_names() const override;
    [[nodiscard]] Vector derived(double t, std::span<const double> x) const override;

    struct Control {
        double e;
        double chi;
        double u;
    };
    [[nodiscard]] Control control(std::span<const double> x) const;

private:
    RegulationLoopConfig cfg_;
    std::size_t nx_, nv_, neta_, na_, dim_;
    bool adaptive_;
};

/// Frequency estimator driven by y0 = Gamma v: stack (v, eta, a_hat).
struct ObserverLoopConfig {
    Exosystem exo;
    InternalModelSpec spec;
    double k1 = 1.0;
    Vector eta0;
    Vector a_hat0;
    double direct_cond_cap = kDefaultDirectCondCap;
};

class ObserverLoop final : public ClosedLoop {
public:
    explicit ObserverLoop(ObserverLoopConfig cfg);

    [[nodiscard]] std::size_t dim() const override { return nv_ + neta_ + na_; }
    [[nodiscard]] Vector initial_state() const override;
    void rhs(double t, std::span<const double> x, std::span<double> dx) const override;
    [[nodiscard]] std::vector<std::string> state_names() const override;
    [[nodiscard]] std::vector<std::string> derived_names() const override;
    [[nodiscard]] Vector derived(double t, std::span<const double> x) const override;

private:
    ObserverLoopConfig cfg_;
    std::size_t nv_, neta_, na_;
};

/// Observer, regulator-equation gradient flow and feedforward control on a
/// linear plant: stack (x, v, eta, a_hat, zeta_hat). u = 0 before t_on.
struct FeedforwardLoopConfig {
    LinearPlant plant;
    Exosystem exo;
    InternalModelSpec spec;
    double k1 = 1.0;
    double k2 = 1.0;
    double t_on = 0.0;
    Vector x0;
    Vector eta0;
    Vector a_hat0;
    Vector zeta0;
};

class FeedforwardLoop final : public ClosedLoop {
public:
    explicit FeedforwardLoop(FeedforwardLoopConfig cfg);

    [[nodiscard]] std::size_t dim() const override { return nx_ + nv_ + neta_ + na_ + nz_; }
    [[nodiscard]] Vector initial_state() const override;
    void rhs(double t, std::span<const double> x, std::span<double> dx) const override;
    [[nodiscard]] std::vector<std::string> state_names() const override;
    [[nodiscard]] std::vector<std::string> derived_names() const override;
    [[nodiscard]] Vector derived(double t, std::span<const double> x) const override;
    [[nodiscard]] std::vector<double> breakpoints() const override;

    [[nodiscard]] double control(double t, std::span<const double> x) const;
    /// Static solution of the regulator equations at the true a.
    [[nodiscard]] const RegulatorSolution& static_solution() const noexcept { return exact_; }
    [[nodiscard]] const RegulatorSystem& true_system() const noexcept { return sys_; }
    [[nodiscard]] std::size_t zeta_offset() const noexcept { return nx_ + nv_ + neta_ + na_; }
    [[nodiscard]] std::size_t a_hat_offset() const noexcept { return nx_ + nv_ + neta_; }

private:
    FeedforwardLoopConfig cfg_;
    std::size_t nx_, nv_, neta_, na_, nz_;
    RegulatorSystem sys_;
    RegulatorSolution exact_;
    double exact_norm_;
};

/// Frequency estimates padded with NaN up to count entries.
Vector padded_frequencies(const CoeffVector& a_hat, std::size_t count);

} // namespace regulata
