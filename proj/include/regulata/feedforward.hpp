#pragma once

#include <span>

#include "regulata/imodel.hpp"
#include "regulata/matcore.hpp"

namespace regulata {

/// x' = A x + B u + P v,  e = C x + D u + F v,  stabilized by u = K_x x + ...
struct LinearPlant {
    Matrix A, B, P, C, D, F, Kx;

    /// Validates shapes and that A + B K_x is Hurwitz.
    static LinearPlant make(Matrix A, Matrix B, Matrix P, Matrix C, Matrix D, Matrix F, Matrix Kx);

    [[nodiscard]] std::size_t nx() const noexcept { return A.rows(); }
    [[nodiscard]] std::size_t nv() const noexcept { return P.cols(); }
};

/// The regulator equations X Phi = A X + B U + P, 0 = C X + D U + F in
/// vectorized form  Acal zeta = Bcal,  zeta = vec(col(X, U)).
struct RegulatorSystem {
    Matrix Acal;
    Vector Bcal;
};

struct RegulatorSolution {
    Vector zeta;
    Matrix X;   // nx x n
    Matrix U;   // 1 x n
    double k2 = 1.0;

    /// Splits zeta by column unstacking into the (nx+1) x n block col(X, U).
    static RegulatorSolution from_zeta(Vector zeta, std::size_t nx, std::size_t n, double k2 = 1.0);
    /// vec(col(X, U)).
    static Vector stack(const Matrix& X, const Matrix& U);
};

RegulatorSystem assemble_regulator_system(const LinearPlant& plant, const CoeffVector& a_hat);

/// Kronecker-form coefficient matrix only; rebuilt every step as a_hat moves.
Matrix regulator_matrix(const LinearPlant& plant, const CoeffVector& a_hat);

/// Direct dense solve. Throws Singular when a transmission zero of the plant
/// coincides with an exosystem mode.
RegulatorSolution solve_regulator_static(const RegulatorSystem& sys, std::size_t nx, double k2 = 1.0);

struct RegulatorResiduals {
    double state_equation;   // ||X Phi - A X - B U - P||_F
    double output_equation;  // ||C X + D U + F||_F
};
RegulatorResiduals regulator_residuals(const LinearPlant& plant, const CoeffVector& a,
                                       const Matrix& X, const Matrix& U);

/// zeta' = -k2 Acal^T (Acal zeta - Bcal).
Vector gradient_flow_rhs(std::span<const double> zeta, const Matrix& Acal,
                         std::span<const double> Bcal, double k2);
Vector gradient_flow_rhs(const RegulatorSolution& sol, const Matrix& Acal,
                         std::span<const double> Bcal);

/// 0.5 * ||Acal zeta - Bcal||^2.
double gradient_flow_loss(std::span<const double> zeta, const Matrix& Acal,
                          std::span<const double> Bcal);

/// u = K_x x + (U_hat - K_x X_hat) Xi(a_hat) col(eta_1..eta_n).
double feedforward_control(const LinearPlant& plant, const RegulatorSolution& sol,
                           const InternalModelSpec& spec, std::span<const double> eta,
                           const CoeffVector& a_hat, std::span<const double> x);

} // namespace regulata
