#pragma once

#include <vector>

namespace regulata {

/// rho(e) = c0 + c1 e^2 + c2 e^4 + ..., nonnegative coefficients, c0 >= 1.
class EvenPolynomial {
public:
    EvenPolynomial() : coeffs_{1.0} {}
    explicit EvenPolynomial(std::vector<double> coeffs);

    double operator()(double e) const noexcept;
    [[nodiscard]] const std::vector<double>& coefficients() const noexcept { return coeffs_; }

private:
    std::vector<double> coeffs_;
};

enum class GainMode { Fixed, Adaptive };

struct GainLaw {
    GainMode mode = GainMode::Fixed;
    double k = 1.0;       // fixed mode
    double k_hat = 1.0;   // adaptive mode, initial value; the live value is loop state
    EvenPolynomial rho;

    static GainLaw fixed(double k, EvenPolynomial rho);
    static GainLaw adaptive(double k_hat0, EvenPolynomial rho);
};

/// u = -k rho(e) e + chi_val
double control_fixed(const GainLaw& gain, double e, double chi_val);

/// k_hat' = rho(e) e^2
double adaptive_gain_rhs(const GainLaw& gain, double e);

/// u = -k_hat rho(e) e + chi_val, with k_hat the current adaptive state.
double control_adaptive(const GainLaw& gain, double k_hat, double e, double chi_val);

} // namespace regulata
