#include "regulata/imodel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace regulata {

namespace {

void require_eta(std::span<const double> eta, std::size_t n) {
    if (eta.size() != 2 * n) {
        fail(ErrorCode::ShapeMismatch, "internal model state must have 2n entries");
    }
}

} // namespace

InternalModelSpec InternalModelSpec::make(std::size_t n, Vector m, double hurwitz_margin) {
    if (n == 0) fail(ErrorCode::InvalidArgument, "internal model order must be positive");
    if (m.size() != 2 * n) {
        std::ostringstream os;
        os << "internal model needs " << 2 * n << " coefficients m, got " << m.size();
        fail(ErrorCode::ShapeMismatch, os.str());
    }
    auto mn = internal_model_matrices(m, hurwitz_margin);
    InternalModelSpec spec;
    spec.n = n;
    spec.m = std::move(m);
    spec.M = std::move(mn.M);
    spec.N = std::move(mn.N);
    spec.Gamma = gamma_row(n);
    return spec;
}

const Matrix& InternalModelSpec::attach_exosystem(const CoeffVector& a) {
    if (a.size() != n) fail(ErrorCode::ShapeMismatch, "exosystem order differs from model order");
    const Matrix phi = companion(a);
    Matrix q = solve_generalized_sylvester(M, phi, N, Gamma);
    const double resid = (M * q - q * phi + N * Gamma).frobenius_norm();
    if (resid > 1e-10 * (1.0 + q.frobenius_norm())) {
        std::ostringstream os;
        os << "generalized Sylvester residual " << resid << " exceeds bound";
        fail(ErrorCode::VerificationFailure, os.str());
    }
    Q = std::move(q);
    return *Q;
}

Vector internal_model_rhs(const InternalModelSpec& spec, std::span<const double> eta, double u) {
    require_eta(eta, spec.n);
    // Companion action: shift up, last row -m . eta, plus u.
    const std::size_t p = eta.size();
    Vector d(p);
    for (std::size_t i = 0; i + 1 < p; ++i) d[i] = eta[i + 1];
    double last = u;
    for (std::size_t j = 0; j < p; ++j) last -= spec.m[j] * eta[j];
    d[p - 1] = last;
    return d;
}

double chi(const InternalModelSpec& spec, std::span<const double> eta, const CoeffVector& a_hat) {
    require_eta(eta, spec.n);
    if (a_hat.size() != spec.n) fail(ErrorCode::ShapeMismatch, "chi: a_hat has wrong length");
    const Matrix xi = xi_matrix_unchecked(a_hat, spec.m);
    // Gamma selects the first row of Xi.
    double s = 0.0;
    for (std::size_t j = 0; j < spec.n; ++j) s += xi(0, j) * eta[j];
    return s;
}

double reconstruct_output(const InternalModelSpec& spec, std::span<const double> eta,
                          const CoeffVector& a_hat) {
    return chi(spec, eta, a_hat);
}

double bump(double s) noexcept { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

double smooth_step(double s) noexcept {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = bump(s);
    const double b = bump(1.0 - s);
    return a / (a + b);
}

double chi_saturated(const InternalModelSpec& spec, std::span<const double> eta,
                     const CoeffVector& a_hat, const SaturationConfig& sat) {
    double r2 = 0.0;
    for (double x : eta) r2 += x * x;
    for (double x : a_hat.values) r2 += x * x;
    const double w = smooth_step(sat.delta + 1.0 - r2);
    if (w == 0.0) return 0.0;
    return chi(spec, eta, a_hat) * w;
}

double learning_loss(std::span<const double> eta, const CoeffVector& a_hat) {
    const Matrix theta = hankel(eta);
    const std::size_t n = theta.rows();
    if (a_hat.size() != n) fail(ErrorCode::ShapeMismatch, "learning_loss: a_hat has wrong length");
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = eta[n + i];
        for (std::size_t j = 0; j < n; ++j) r += theta(i, j) * a_hat[j];
        loss += r * r;
    }
    return 0.5 * loss;
}

Vector learning_rhs(std::span<const double> eta, const CoeffVector& a_hat, double k1) {
    const std::size_t n = eta.size() / 2;
    if (eta.size() != 2 * n || n == 0) {
        fail(ErrorCode::ShapeMismatch, "learning_rhs: eta must have 2n entries");
    }
    if (a_hat.size() != n) fail(ErrorCode::ShapeMismatch, "learning_rhs: a_hat has wrong length");
    // Theta(eta)(i, j) = eta[i + j]; Theta is symmetric so Theta^T r = Theta r.
    Vector r(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = eta[n + i];
        for (std::size_t j = 0; j < n; ++j) s += eta[i + j] * a_hat[j];
        r[i] = s;
    }
    Vector d(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += eta[i + j] * r[i];
        d[j] = -k1 * s;
    }
    return d;
}

Vector learning_rhs(const InternalModelSpec& spec, const EstimatorState& state) {
    require_eta(state.eta, spec.n);
    if (!(state.k1 > 0.0)) fail(ErrorCode::InvalidArgument, "learning gain k1 must be positive");
    return learning_rhs(state.eta, state.a_hat, state.k1);
}

std::optional<CoeffVector> direct_a_estimate(std::span<const double> eta, double cond_cap) {
    const Matrix theta = hankel(eta);
    const std::size_t n = theta.rows();
    const double cond = condition_number(theta);
    if (!(cond <= cond_cap)) return std::nullopt;
    Vector rhs(eta.begin() + static_cast<std::ptrdiff_t>(n), eta.end());
    for (double& x : rhs) x = -x;
    LuFactorization lu(theta);
    if (lu.singular()) return std::nullopt;
    return CoeffVector(lu.solve(rhs));
}

FrequencyEstimate frequencies_from_a(const CoeffVector& a_hat) {
    if (a_hat.size() == 0) fail(ErrorCode::InvalidArgument, "frequencies_from_a: empty vector");
    FrequencyEstimate est;
    est.raw_spectrum = eigenvalues(companion(a_hat));
    const auto& eig = est.raw_spectrum.eigenvalues;
    const double tol = kFrequencyDedupTolerance;

    for (const auto& z : eig) {
        if (std::abs(z.imag()) <= tol * (1.0 + std::abs(z))) continue;
        const bool paired = std::any_of(eig.begin(), eig.end(), [&](const auto& w) {
            return std::abs(w - std::conj(z)) <= tol * (1.0 + std::abs(z));
        });
        if (!paired) {
            std::ostringstream os;
            os << "eigenvalue (" << z.real() << ", " << z.imag() << ") has no conjugate partner";
            fail(ErrorCode::ComplexPairingFailure, os.str());
        }
    }

    Vector omegas;
    for (const auto& z : eig) {
        if (std::abs(z) < tol) {
            est.bias_present = true;
            continue;
        }
        if (z.imag() > tol) omegas.push_back(z.imag());
    }
    std::sort(omegas.begin(), omegas.end());
    for (double w : omegas) {
        if (est.omegas.empty() || w - est.omegas.back() > tol) est.omegas.push_back(w);
    }
    return est;
}

std::optional<std::pair<double, double>> two_tone_frequencies(const CoeffVector& a) {
    if (a.size() != 4) return std::nullopt;
    const double a1 = a[0];
    const double a3 = a[2];
    const double disc = a3 * a3 - 4.0 * a1;
    if (!(disc > 0.0)) return std::nullopt;
    const double lo = 0.5 * (a3 - std::sqrt(disc));
    const double hi = 0.5 * (a3 + std::sqrt(disc));
    if (!(lo > 0.0)) return std::nullopt;
    return std::pair{std::sqrt(lo), std::sqrt(hi)};
}

} // namespace regulata
