#include "regulata/plants.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace regulata {

void LorenzPlant::validate() const {
    const auto l = L();
    if (!(l[0] > 0.0)) fail(ErrorCode::InvalidArgument, "Lorenz plant: L1 must be positive");
    if (!(l[2] < 0.0)) fail(ErrorCode::InvalidArgument, "Lorenz plant: L3 must be negative");
    if (!(b > 0.0)) fail(ErrorCode::InvalidArgument, "Lorenz plant: input gain b must be positive");
    if (!(sigma > 0.0)) fail(ErrorCode::InvalidArgument, "Lorenz plant: sigma must be positive");
}

LorenzDerivative lorenz_rhs(const LorenzPlant& p, std::span<const double> z, double y,
                            std::span<const double> v, double u) {
    (void)v;  // b(v, w) is constant here
    const auto l = p.L();
    LorenzDerivative d{};
    d.dz[0] = -l[0] * z[0] + l[0] * y;
    d.dz[1] = y * z[0] - l[1] * z[1];
    d.dy = z[0] * (l[2] - z[1]) - y + p.b * u;
    return d;
}

Matrix lorenz_exosystem_matrix(double sigma) { return Matrix{{0.0, sigma}, {-sigma, 0.0}}; }

CoeffVector lorenz_generator_coeffs(double sigma) {
    const double s2 = sigma * sigma;
    return CoeffVector{9.0 * s2 * s2, 0.0, 10.0 * s2, 0.0};
}

LorenzPlantModel::LorenzPlantModel(LorenzPlant p) : p_(p) { p_.validate(); }

void LorenzPlantModel::rhs(double, std::span<const double> x, double u, std::span<const double> v,
                           std::span<double> dx) const {
    const auto d = lorenz_rhs(p_, x.first(2), x[2], v, u);
    dx[0] = d.dz[0];
    dx[1] = d.dz[1];
    dx[2] = d.dy;
}

double LorenzPlantModel::error(std::span<const double> x, std::span<const double> v) const {
    return x[2] - v[0];
}

void QuarterCarPlant::validate() const {
    if (!(m_s > 0.0 && m_u > 0.0 && k_s > 0.0 && k_t > 0.0)) {
        fail(ErrorCode::InvalidArgument, "quarter car: masses and stiffnesses must be positive");
    }
    if (!(b_s >= 0.0 && b_t >= 0.0)) {
        fail(ErrorCode::InvalidArgument, "quarter car: damping must be nonnegative");
    }
}

QuarterCarMatrices quarter_car_matrices(const QuarterCarPlant& p) {
    p.validate();
    QuarterCarMatrices q;
    q.A = Matrix{{0.0, 1.0, 0.0, -1.0},
                 {-p.k_s / p.m_s, -p.b_s / p.m_s, 0.0, p.b_s / p.m_s},
                 {0.0, 0.0, 0.0, 1.0},
                 {p.k_s / p.m_u, p.b_s / p.m_u, -p.k_t / p.m_u, -(p.b_s + p.b_t) / p.m_u}};
    q.B = Matrix{{0.0}, {1.0 / p.m_s}, {0.0}, {-1.0 / p.m_s}};
    q.Bd = Matrix{{0.0}, {0.0}, {-1.0}, {p.b_t / p.m_u}};
    return q;
}

LinearPlant quarter_car_linear_plant(const QuarterCarPlant& p, std::size_t exo_order, Matrix Kx) {
    auto q = quarter_car_matrices(p);
    Matrix P = q.Bd * gamma_row(exo_order);
    Matrix C(1, 4);
    C(0, 0) = 1.0;
    return LinearPlant::make(std::move(q.A), std::move(q.B), std::move(P), std::move(C),
                             Matrix(1, 1), Matrix(1, exo_order), std::move(Kx));
}

LinearPlantModel::LinearPlantModel(LinearPlant p) : plant_(std::move(p)) {
    if (plant_.D(0, 0) != 0.0) {
        fail(ErrorCode::InvalidArgument, "output-feedback loop requires D = 0");
    }
}

void LinearPlantModel::rhs(double, std::span<const double> x, double u, std::span<const double> v,
                           std::span<double> dx) const {
    const auto& p = plant_;
    for (std::size_t i = 0; i < p.nx(); ++i) {
        double s = p.B(i, 0) * u;
        for (std::size_t j = 0; j < p.nx(); ++j) s += p.A(i, j) * x[j];
        for (std::size_t j = 0; j < p.nv(); ++j) s += p.P(i, j) * v[j];
        dx[i] = s;
    }
}

double LinearPlantModel::error(std::span<const double> x, std::span<const double> v) const {
    const auto& p = plant_;
    double e = 0.0;
    for (std::size_t j = 0; j < p.nx(); ++j) e += p.C(0, j) * x[j];
    for (std::size_t j = 0; j < p.nv(); ++j) e += p.F(0, j) * v[j];
    return e;
}

Exosystem Exosystem::from_coeffs(CoeffVector a, Vector v0) {
    if (a.size() != v0.size()) {
        fail(ErrorCode::ShapeMismatch, "exosystem: v0 length must equal generator order");
    }
    Exosystem e;
    e.S = companion(a);
    e.a = std::move(a);
    e.v0 = std::move(v0);
    return e;
}

Exosystem Exosystem::from_matrix(Matrix S, CoeffVector a, Vector v0) {
    if (!S.is_square() || S.rows() != v0.size()) {
        fail(ErrorCode::ShapeMismatch, "exosystem: S must be square and match v0");
    }
    Exosystem e;
    e.S = std::move(S);
    e.a = std::move(a);
    e.v0 = std::move(v0);
    return e;
}

Vector exosystem_rhs(const Exosystem& e, std::span<const double> v) { return e.S * v; }

namespace {

using cplx = std::complex<double>;

// Solves the complex system m x = b by partial pivoting; m is n x n row-major.
std::vector<cplx> complex_solve(std::vector<cplx> m, std::vector<cplx> b, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m[i * n + k]) > std::abs(m[piv * n + k])) piv = i;
        if (std::abs(m[piv * n + k]) == 0.0) {
            fail(ErrorCode::Singular, "modal decomposition: defective exosystem matrix");
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m[k * n + j], m[piv * n + j]);
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx f = m[i * n + k] / m[k * n + k];
            for (std::size_t j = k; j < n; ++j) m[i * n + j] -= f * m[k * n + j];
            b[i] -= f * b[k];
        }
    }
    std::vector<cplx> x(n);
    for (std::size_t i = n; i-- > 0;) {
        cplx s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= m[i * n + j] * x[j];
        x[i] = s / m[i * n + i];
    }
    return x;
}

// Eigenvector for eigenvalue lambda by two steps of shifted inverse iteration.
std::vector<cplx> eigenvector(const Matrix& S, cplx lambda) {
    const std::size_t n = S.rows();
    const cplx shift = lambda + cplx(1e-10 * (1.0 + std::abs(lambda)), 0.0);
    std::vector<cplx> m(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i * n + j] = S(i, j) - (i == j ? shift : 0.0);
    std::vector<cplx> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = cplx(1.0 + 0.1 * static_cast<double>(i), 0.3);
    for (int it = 0; it < 3; ++it) {
        w = complex_solve(m, w, n);
        double nrm = 0.0;
        for (const auto& c : w) nrm += std::norm(c);
        nrm = std::sqrt(nrm);
        for (auto& c : w) c /= nrm;
    }
    return w;
}

} // namespace

Vector modal_energies(const Exosystem& e, std::span<const double> v) {
    const std::size_t n = e.S.rows();
    const Spectrum spec = eigenvalues(e.S);
    std::vector<cplx> vmat(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto w = eigenvector(e.S, spec.eigenvalues[k]);
        for (std::size_t i = 0; i < n; ++i) vmat[i * n + k] = w[i];
    }
    std::vector<cplx> rhs(v.begin(), v.end());
    const auto c = complex_solve(vmat, rhs, n);

    // One energy per eigenvalue with nonnegative imaginary part; the modal
    // coordinate of a conjugate pair carries the same modulus.
    std::vector<std::pair<double, double>> by_freq;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& z = spec.eigenvalues[k];
        if (z.imag() < -1e-9 * (1.0 + std::abs(z))) continue;
        by_freq.emplace_back(z.imag(), std::norm(c[k]));
    }
    std::sort(by_freq.begin(), by_freq.end());
    Vector out;
    out.reserve(by_freq.size());
    for (const auto& [freq, energy] : by_freq) out.push_back(energy);
    return out;
}

} // namespace regulata
