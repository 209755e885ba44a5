#include "regulata/feedforward.hpp"

#include <sstream>

namespace regulata {

namespace {

void require_shape(const Matrix& m, std::size_t r, std::size_t c, const char* name) {
    if (m.rows() != r || m.cols() != c) {
        std::ostringstream os;
        os << "LinearPlant: " << name << " must be " << r << "x" << c << ", got " << m.rows()
           << "x" << m.cols();
        fail(ErrorCode::ShapeMismatch, os.str());
    }
}

} // namespace

LinearPlant LinearPlant::make(Matrix A, Matrix B, Matrix P, Matrix C, Matrix D, Matrix F,
                              Matrix Kx) {
    const std::size_t nx = A.rows();
    const std::size_t nv = P.cols();
    if (nx == 0 || nv == 0) fail(ErrorCode::ShapeMismatch, "LinearPlant: empty dimensions");
    require_shape(A, nx, nx, "A");
    require_shape(B, nx, 1, "B");
    require_shape(P, nx, nv, "P");
    require_shape(C, 1, nx, "C");
    require_shape(D, 1, 1, "D");
    require_shape(F, 1, nv, "F");
    require_shape(Kx, 1, nx, "K_x");
    const Spectrum s = eigenvalues(A + B * Kx);
    if (!(s.max_real_part() < -kDefaultHurwitzMargin)) {
        fail(ErrorCode::HurwitzViolation, "LinearPlant: A + B K_x is not Hurwitz");
    }
    return LinearPlant{std::move(A), std::move(B), std::move(P), std::move(C),
                       std::move(D), std::move(F), std::move(Kx)};
}

RegulatorSolution RegulatorSolution::from_zeta(Vector zeta, std::size_t nx, std::size_t n,
                                               double k2) {
    const Matrix block = unvec(zeta, nx + 1, n);
    RegulatorSolution sol;
    sol.X = Matrix(nx, n);
    sol.U = Matrix(1, n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = 0; r < nx; ++r) sol.X(r, c) = block(r, c);
        sol.U(0, c) = block(nx, c);
    }
    sol.zeta = std::move(zeta);
    sol.k2 = k2;
    return sol;
}

Vector RegulatorSolution::stack(const Matrix& X, const Matrix& U) {
    if (U.rows() != 1 || U.cols() != X.cols()) {
        fail(ErrorCode::ShapeMismatch, "stack: U must be 1 x n with n = cols(X)");
    }
    Matrix block(X.rows() + 1, X.cols());
    for (std::size_t c = 0; c < X.cols(); ++c) {
        for (std::size_t r = 0; r < X.rows(); ++r) block(r, c) = X(r, c);
        block(X.rows(), c) = U(0, c);
    }
    return vec(block);
}

Matrix regulator_matrix(const LinearPlant& plant, const CoeffVector& a_hat) {
    const std::size_t nx = plant.nx();
    const std::size_t n = a_hat.size();
    if (n != plant.nv()) {
        fail(ErrorCode::ShapeMismatch, "regulator system: exosystem order differs from P columns");
    }
    Matrix selector(nx + 1, nx + 1);
    for (std::size_t i = 0; i < nx; ++i) selector(i, i) = 1.0;
    Matrix plant_block(nx + 1, nx + 1);
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < nx; ++j) plant_block(i, j) = plant.A(i, j);
        plant_block(i, nx) = plant.B(i, 0);
        plant_block(nx, i) = plant.C(0, i);
    }
    plant_block(nx, nx) = plant.D(0, 0);
    return kron(companion(a_hat).transpose(), selector) - kron(Matrix::identity(n), plant_block);
}

RegulatorSystem assemble_regulator_system(const LinearPlant& plant, const CoeffVector& a_hat) {
    RegulatorSystem sys;
    sys.Acal = regulator_matrix(plant, a_hat);
    const std::size_t nx = plant.nx();
    Matrix pf(nx + 1, plant.nv());
    for (std::size_t c = 0; c < plant.nv(); ++c) {
        for (std::size_t r = 0; r < nx; ++r) pf(r, c) = plant.P(r, c);
        pf(nx, c) = plant.F(0, c);
    }
    sys.Bcal = vec(pf);
    return sys;
}

RegulatorSolution solve_regulator_static(const RegulatorSystem& sys, std::size_t nx, double k2) {
    const std::size_t dim = sys.Acal.rows();
    if (!sys.Acal.is_square() || dim % (nx + 1) != 0 || sys.Bcal.size() != dim) {
        fail(ErrorCode::ShapeMismatch, "solve_regulator_static: inconsistent system size");
    }
    LuFactorization lu(sys.Acal);
    if (lu.singular()) {
        fail(ErrorCode::Singular,
             "regulator equations are singular: a plant transmission zero meets an exosystem mode");
    }
    return RegulatorSolution::from_zeta(lu.solve(sys.Bcal), nx, dim / (nx + 1), k2);
}

RegulatorResiduals regulator_residuals(const LinearPlant& plant, const CoeffVector& a,
                                       const Matrix& X, const Matrix& U) {
    const Matrix phi = companion(a);
    RegulatorResiduals r;
    r.state_equation = (X * phi - plant.A * X - plant.B * U - plant.P).frobenius_norm();
    r.output_equation = (plant.C * X + plant.D * U + plant.F).frobenius_norm();
    return r;
}

Vector gradient_flow_rhs(std::span<const double> zeta, const Matrix& Acal,
                         std::span<const double> Bcal, double k2) {
    if (!(k2 > 0.0)) fail(ErrorCode::InvalidArgument, "gradient flow gain k2 must be positive");
    Vector r = Acal * zeta;
    if (r.size() != Bcal.size()) fail(ErrorCode::ShapeMismatch, "gradient flow: Bcal length");
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= Bcal[i];
    Vector d(Acal.cols(), 0.0);
    for (std::size_t i = 0; i < Acal.rows(); ++i) {
        const double ri = r[i];
        if (ri == 0.0) continue;
        for (std::size_t j = 0; j < Acal.cols(); ++j) d[j] += Acal(i, j) * ri;
    }
    for (double& x : d) x *= -k2;
    return d;
}

Vector gradient_flow_rhs(const RegulatorSolution& sol, const Matrix& Acal,
                         std::span<const double> Bcal) {
    return gradient_flow_rhs(sol.zeta, Acal, Bcal, sol.k2);
}

double gradient_flow_loss(std::span<const double> zeta, const Matrix& Acal,
                          std::span<const double> Bcal) {
    Vector r = Acal * zeta;
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double d = r[i] - Bcal[i];
        s += d * d;
    }
    return 0.5 * s;
}

double feedforward_control(const LinearPlant& plant, const RegulatorSolution& sol,
                           const InternalModelSpec& spec, std::span<const double> eta,
                           const CoeffVector& a_hat, std::span<const double> x) {
    const std::size_t n = spec.n;
    if (x.size() != plant.nx() || eta.size() != 2 * n || a_hat.size() != n ||
        sol.X.rows() != plant.nx() || sol.X.cols() != n) {
        fail(ErrorCode::ShapeMismatch, "feedforward_control: dimension mismatch");
    }
    const Matrix xi = xi_matrix_unchecked(a_hat, spec.m);
    const Vector head(eta.begin(), eta.begin() + static_cast<std::ptrdiff_t>(n));
    const Vector v_hat = xi * head;
    const Matrix gain = sol.U - plant.Kx * sol.X;
    double u = 0.0;
    for (std::size_t i = 0; i < plant.nx(); ++i) u += plant.Kx(0, i) * x[i];
    for (std::size_t j = 0; j < n; ++j) u += gain(0, j) * v_hat[j];
    return u;
}

} // namespace regulata
