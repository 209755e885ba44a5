#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "regulata/error.hpp"
#include "regulata/matcore.hpp"

using namespace regulata;

namespace {

oracle::Dense dense(const Matrix& m) {
    oracle::Dense out = oracle::zeros(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an exception");
    return ErrorCode::IoError;
}

} // namespace

TEST_CASE("companion layout") {
    const Matrix c = companion({100.0, 0.0, 29.0, 0.0});
    CHECK(c(0, 1) == 1.0);
    CHECK(c(2, 3) == 1.0);
    CHECK(c(3, 0) == -100.0);
    CHECK(c(3, 2) == -29.0);
    CHECK(c(0, 0) == 0.0);
}

TEST_CASE("companion spectrum is +-2i, +-5i") {
    auto s = eigenvalues(companion({100.0, 0.0, 29.0, 0.0}));
    std::vector<double> im;
    for (auto z : s.eigenvalues) {
        CHECK(std::abs(z.real()) < 1e-9);
        im.push_back(z.imag());
    }
    std::sort(im.begin(), im.end());
    CHECK(im[0] == doctest::Approx(-5.0).epsilon(1e-10));
    CHECK(im[1] == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(im[2] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(im[3] == doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("internal model with all poles at -1") {
    const auto im = internal_model_matrices(std::vector<double>{1, 8, 28, 56, 70, 56, 28, 8});
    CHECK(im.hurwitz);
    CHECK(im.N(7, 0) == 1.0);
    // (s+1)^8 has an eightfold root, so QR only resolves it to about eps^(1/8).
    CHECK(im.spectrum.max_real_part() < -0.9);
    CHECK(code_of([] { internal_model_matrices(std::vector<double>{1.0, -1.0}); }) ==
          ErrorCode::HurwitzViolation);
}

TEST_CASE("Xi matches explicit power sum") {
    std::mt19937_64 rng(7);
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto inst = oracle::random_instance(n, rng);
        const Matrix x = xi_matrix(CoeffVector(inst.a), inst.m);
        const auto ref = oracle::xi(inst.a, inst.m);
        CHECK(oracle::fro_diff(dense(x), ref) <= 1e-12 * oracle::fro(ref));
    }
}

TEST_CASE("Sylvester solution for n = 1, a = 0, m = (2, 3)") {
    const std::vector<double> m{2.0, 3.0};
    const auto im = internal_model_matrices(m);
    const Matrix q = solve_generalized_sylvester(im.M, companion({0.0}), im.N, gamma_row(1));
    REQUIRE(q.rows() == 2);
    CHECK(q(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(q(1, 0)) < 1e-14);
}

TEST_CASE("Sylvester Kronecker solve agrees with the row formula and the equation") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + trial % 4;
        const auto inst = oracle::random_instance(n, rng);
        const CoeffVector a(inst.a);
        const auto im = internal_model_matrices(inst.m);
        const Matrix q = solve_generalized_sylvester(im.M, companion(a), im.N, gamma_row(n));
        const Matrix rows = sylvester_rows(a, inst.m);
        CHECK((q - rows).frobenius_norm() <= 1e-9 * q.frobenius_norm());

        // M Q - Q Phi + N Gamma with naive products
        const auto M = dense(im.M), Q = dense(q), phi = oracle::companion(inst.a);
        auto r = oracle::mul(M, Q);
        const auto qp = oracle::mul(Q, phi);
        for (std::size_t i = 0; i < r.size(); ++i)
            for (std::size_t j = 0; j < n; ++j) r[i][j] -= qp[i][j];
        r[2 * n - 1][0] += 1.0;
        CHECK(oracle::fro(r) <= 1e-9 * (1.0 + oracle::fro(Q) * (oracle::fro(M) + oracle::fro(phi))));
    }
}

TEST_CASE("Hankel layout") {
    const std::vector<double> theta{1, 2, 3, 4, 5, 6};
    const Matrix h = hankel(theta);
    CHECK(h == Matrix{{1, 2, 3}, {2, 3, 4}, {3, 4, 5}});
    CHECK(code_of([] { hankel(std::vector<double>{1, 2, 3}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("vec, unvec and the Kronecker identity vec(AXB) = (B^T kron A) vec(X)") {
    const Matrix A{{1, 2}, {3, 4}, {5, 6}};
    const Matrix X{{1, -1, 2}, {0, 3, 1}};
    const Matrix B{{2, 0}, {1, 1}, {-1, 4}};
    const Vector lhs = vec(A * X * B);
    const Vector rhs = kron(B.transpose(), A) * vec(X);
    REQUIRE(lhs.size() == rhs.size());
    for (std::size_t i = 0; i < lhs.size(); ++i) CHECK(lhs[i] == doctest::Approx(rhs[i]));
    CHECK(vec(Matrix{{1, 2}, {3, 4}}) == Vector{1, 3, 2, 4});
    CHECK(unvec(vec(X), 2, 3) == X);
}

TEST_CASE("dense solve, inverse and LU") {
    const Matrix a{{4, 1, 2}, {1, 5, 3}, {2, 3, 6}};
    const Vector b{1, 2, 3};
    const Vector x = solve(a, b);
    const auto ref = oracle::solve(dense(a), {{1}, {2}, {3}});
    for (int i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(ref[i][0]).epsilon(1e-13));
    const Matrix id = a * inverse(a);
    CHECK((id - Matrix::identity(3)).max_abs() < 1e-14);
    LuFactorization lu(a);
    CHECK_FALSE(lu.singular());
    const Vector y = lu.solve(b);
    for (int i = 0; i < 3; ++i) CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-14));
    CHECK(code_of([] { solve(Matrix{{1, 2}, {2, 4}}, Vector{1, 1}); }) == ErrorCode::Singular);
}

TEST_CASE("singular values and condition number") {
    // diag(3, 2) rotated on both sides keeps its singular values
    const double c = std::cos(0.3), s = std::sin(0.3);
    const Matrix r1{{c, -s}, {s, c}}, r2{{c, s}, {-s, c}};
    const Matrix a = r1 * Matrix{{3, 0}, {0, 2}} * r2;
    const Vector sv = singular_values(a);
    CHECK(sv[0] == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(sv[1] == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(condition_number(a) == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(std::isinf(condition_number(Matrix{{1, 1}, {1, 1}})));
}

TEST_CASE("eigenvalues of a nonsymmetric matrix") {
    // upper triangular: eigenvalues on the diagonal
    auto s = eigenvalues(Matrix{{1, 5, 7}, {0, -2, 3}, {0, 0, 4}});
    std::vector<double> re;
    for (auto z : s.eigenvalues) {
        CHECK(std::abs(z.imag()) < 1e-12);
        re.push_back(z.real());
    }
    std::sort(re.begin(), re.end());
    CHECK(re[0] == doctest::Approx(-2.0));
    CHECK(re[1] == doctest::Approx(1.0));
    CHECK(re[2] == doctest::Approx(4.0));
    CHECK(s.max_real_part() == doctest::Approx(4.0));
}

TEST_CASE("Xi conditioning cap") {
    // m(s) vanishing on the generator spectrum makes Xi singular
    CHECK(code_of([] { xi_matrix({4.0, 0.0}, std::vector<double>{4.0, 0.0, 5.0, 0.0}); }) ==
          ErrorCode::SingularXi);
}
