#pragma once

#include <array>
#include <span>

#include "regulata/feedforward.hpp"
#include "regulata/matcore.hpp"

namespace regulata {

/// Controlled plant seen by the output-feedback regulator: state x, scalar
/// input u, exosystem state v, regulated error e = h(x, v).
class PlantModel {
public:
    virtual ~PlantModel() = default;

    [[nodiscard]] virtual std::size_t state_dim() const = 0;
    virtual void rhs(double t, std::span<const double> x, double u, std::span<const double> v,
                     std::span<double> dx) const = 0;
    [[nodiscard]] virtual double error(std::span<const double> x, std::span<const double> v) const = 0;
};

/// Controlled Lorenz dynamics with uncertain parameters L = L_bar + w.
///   z'  = [[-L1, 0], [y, -L2]] z + (L1 y, 0)
///   y'  = z1 (L3 - z2) - y + b u
///   e   = y - v1
struct LorenzPlant {
    std::array<double, 3> L_bar{10.0, 8.0 / 3.0, -28.0};
    std::array<double, 3> w{0.0, 0.0, 0.0};
    double b = 1.0;       // input gain b(v, w), constant in the bundled scenarios
    double sigma = 1.0;   // exosystem rate

    [[nodiscard]] std::array<double, 3> L() const noexcept {
        return {L_bar[0] + w[0], L_bar[1] + w[1], L_bar[2] + w[2]};
    }
    /// Throws InvalidArgument unless L1 > 0, L3 < 0 and b > 0.
    void validate() const;
};

struct LorenzDerivative {
    std::array<double, 2> dz;
    double dy;
};

LorenzDerivative lorenz_rhs(const LorenzPlant& p, std::span<const double> z, double y,
                            std::span<const double> v, double u);

/// Exosystem of the Lorenz example: v' = [[0, sigma], [-sigma, 0]] v.
Matrix lorenz_exosystem_matrix(double sigma);

/// Generator coefficients col(9 sigma^4, 0, 10 sigma^2, 0) of the steady-state input.
CoeffVector lorenz_generator_coeffs(double sigma);

class LorenzPlantModel final : public PlantModel {
public:
    explicit LorenzPlantModel(LorenzPlant p);

    [[nodiscard]] std::size_t state_dim() const override { return 3; }  // z1, z2, y
    void rhs(double t, std::span<const double> x, double u, std::span<const double> v,
             std::span<double> dx) const override;
    [[nodiscard]] double error(std::span<const double> x, std::span<const double> v) const override;

    [[nodiscard]] const LorenzPlant& params() const noexcept { return p_; }

private:
    LorenzPlant p_;
};

/// Quarter-car active suspension; units kg, N s/m, N/m.
struct QuarterCarPlant {
    double m_s = 2.40;
    double m_u = 0.36;
    double b_s = 9.8;
    double k_s = 160.0;
    double k_t = 1600.0;
    double b_t = 0.0;

    void validate() const;
};

struct QuarterCarMatrices {
    Matrix A;   // 4 x 4
    Matrix B;   // 4 x 1
    Matrix Bd;  // 4 x 1, road velocity input
};

/// State (suspension deflection, sprung velocity, tire deflection, unsprung velocity).
QuarterCarMatrices quarter_car_matrices(const QuarterCarPlant& p);

/// The suspension as a LinearPlant regulating x1 against road velocity
/// z_r' = Gamma v: P = B_d Gamma, C = e_1^T, D = 0, F = 0.
LinearPlant quarter_car_linear_plant(const QuarterCarPlant& p, std::size_t exo_order, Matrix Kx);

/// Generic LTI plant wrapper for the output-feedback loop (D must be 0).
class LinearPlantModel final : public PlantModel {
public:
    explicit LinearPlantModel(LinearPlant p);

    [[nodiscard]] std::size_t state_dim() const override { return plant_.nx(); }
    void rhs(double t, std::span<const double> x, double u, std::span<const double> v,
             std::span<double> dx) const override;
    [[nodiscard]] double error(std::span<const double> x, std::span<const double> v) const override;

    [[nodiscard]] const LinearPlant& plant() const noexcept { return plant_; }

private:
    LinearPlant plant_;
};

/// v' = S v with S = companion(a) unless an explicit matrix is supplied;
/// y0 = Gamma v = v1.
struct Exosystem {
    CoeffVector a;
    Vector v0;
    Matrix S;

    static Exosystem from_coeffs(CoeffVector a, Vector v0);
    static Exosystem from_matrix(Matrix S, CoeffVector a, Vector v0);

    [[nodiscard]] std::size_t dim() const noexcept { return v0.size(); }
};

Vector exosystem_rhs(const Exosystem& e, std::span<const double> v);

/// Energy of v in each invariant plane of S (one entry per distinct
/// frequency, plus one for a zero mode), computed in the modal coordinates
/// of the real Jordan form. Conserved along exact trajectories.
Vector modal_energies(const Exosystem& e, std::span<const double> v);

} // namespace regulata
