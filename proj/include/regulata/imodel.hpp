#pragma once

#include <optional>
#include <span>

#include "regulata/matcore.hpp"

namespace regulata {

/// Linear generic internal model eta' = M eta + N u together with the
/// output row Gamma of the steady-state generator and, once an exosystem is
/// known, the Sylvester solution Q.
struct InternalModelSpec {
    std::size_t n = 0;   // generator order; eta has 2n entries
    Vector m;            // m1..m2n
    Matrix M;
    Matrix N;
    Matrix Gamma;
    std::optional<Matrix> Q;

    static InternalModelSpec make(std::size_t n, Vector m,
                                  double hurwitz_margin = kDefaultHurwitzMargin);

    /// Solves M Q = Q Phi(a) - N Gamma and stores Q. Throws NoUniqueSolution
    /// if the spectra meet, VerificationFailure if the residual bound fails.
    const Matrix& attach_exosystem(const CoeffVector& a);

    [[nodiscard]] std::size_t state_dim() const noexcept { return 2 * n; }
};

struct EstimatorState {
    Vector eta;
    CoeffVector a_hat;
    double k1 = 1.0;
};

struct SaturationConfig {
    double delta = 1e6;
};

struct FrequencyEstimate {
    Vector omegas;             // rad/s, strictly increasing
    bool bias_present = false;
    Spectrum raw_spectrum;
};

Vector internal_model_rhs(const InternalModelSpec& spec, std::span<const double> eta, double u);

/// chi(eta, a) = Gamma Xi(a) col(eta_1..eta_n). Only forward products of
/// Xi are taken, so this is total in a.
double chi(const InternalModelSpec& spec, std::span<const double> eta, const CoeffVector& a_hat);

/// Same map read as the observer output estimate y_hat.
double reconstruct_output(const InternalModelSpec& spec, std::span<const double> eta,
                          const CoeffVector& a_hat);

/// psi(s) = exp(-1/s) for s > 0, else 0.
double bump(double s) noexcept;
/// Psi(s) = psi(s) / (psi(s) + psi(1 - s)); 0 for s <= 0, 1 for s >= 1.
double smooth_step(double s) noexcept;

double chi_saturated(const InternalModelSpec& spec, std::span<const double> eta,
                     const CoeffVector& a_hat, const SaturationConfig& sat);

/// a_hat' = -k1 Theta(eta)^T [Theta(eta) a_hat + col(eta_n+1..eta_2n)].
Vector learning_rhs(const InternalModelSpec& spec, const EstimatorState& state);
Vector learning_rhs(std::span<const double> eta, const CoeffVector& a_hat, double k1);

/// 0.5 * ||Theta(eta) a + col(eta_n+1..eta_2n)||^2, the loss the learning
/// flow descends.
double learning_loss(std::span<const double> eta, const CoeffVector& a_hat);

constexpr double kDefaultDirectCondCap = 1e8;

/// a_eta = -Theta(eta)^-1 col(eta_n+1..eta_2n), or nullopt while Theta(eta)
/// is too ill-conditioned to invert.
std::optional<CoeffVector> direct_a_estimate(std::span<const double> eta,
                                             double cond_cap = kDefaultDirectCondCap);

constexpr double kFrequencyDedupTolerance = 1e-6;

/// Frequencies as the positive imaginary parts of the spectrum of
/// companion(a_hat). Throws ComplexPairingFailure when a complex eigenvalue
/// has no conjugate partner.
FrequencyEstimate frequencies_from_a(const CoeffVector& a_hat);

/// Closed form for a 4th-order two-tone generator s^4 + a3 s^2 + a1:
/// omega = sqrt((a3 -/+ sqrt(a3^2 - 4 a1)) / 2). nullopt when the
/// discriminant or either radicand is not positive.
std::optional<std::pair<double, double>> two_tone_frequencies(const CoeffVector& a);

} // namespace regulata
