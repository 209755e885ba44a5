#include "regulata/regulator.hpp"

#include <algorithm>
#include <cmath>

#include "regulata/error.hpp"

namespace regulata {

EvenPolynomial::EvenPolynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(1.0);
    if (!(coeffs_.front() >= 1.0)) {
        fail(ErrorCode::InvalidArgument, "rho: constant term must be >= 1");
    }
    if (std::any_of(coeffs_.begin(), coeffs_.end(),
                    [](double c) { return !(c >= 0.0) || !std::isfinite(c); })) {
        fail(ErrorCode::InvalidArgument, "rho: coefficients must be finite and nonnegative");
    }
}

double EvenPolynomial::operator()(double e) const noexcept {
    const double e2 = e * e;
    double s = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) s = s * e2 + *it;
    return s;
}

GainLaw GainLaw::fixed(double k, EvenPolynomial rho) {
    if (!(k > 0.0)) fail(ErrorCode::InvalidArgument, "fixed gain k must be positive");
    GainLaw g;
    g.mode = GainMode::Fixed;
    g.k = k;
    g.rho = std::move(rho);
    return g;
}

GainLaw GainLaw::adaptive(double k_hat0, EvenPolynomial rho) {
    if (!(k_hat0 >= 0.0)) fail(ErrorCode::InvalidArgument, "initial adaptive gain must be >= 0");
    GainLaw g;
    g.mode = GainMode::Adaptive;
    g.k_hat = k_hat0;
    g.rho = std::move(rho);
    return g;
}

double control_fixed(const GainLaw& gain, double e, double chi_val) {
    if (gain.mode != GainMode::Fixed) fail(ErrorCode::InvalidArgument, "gain law is not fixed");
    return -gain.k * gain.rho(e) * e + chi_val;
}

double adaptive_gain_rhs(const GainLaw& gain, double e) {
    if (gain.mode != GainMode::Adaptive) {
        fail(ErrorCode::InvalidArgument, "gain law is not adaptive");
    }
    return gain.rho(e) * e * e;
}

double control_adaptive(const GainLaw& gain, double k_hat, double e, double chi_val) {
    if (gain.mode != GainMode::Adaptive) {
        fail(ErrorCode::InvalidArgument, "gain law is not adaptive");
    }
    return -k_hat * gain.rho(e) * e + chi_val;
}

} // namespace regulata
