#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "regulata/error.hpp"
#include "regulata/plants.hpp"
#include "regulata/simkit.hpp"

using namespace regulata;

TEST_CASE("quarter car matrices reproduce the symbolic display") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> pos(0.1, 50.0);
    for (int trial = 0; trial < 25; ++trial) {
        QuarterCarPlant p;
        if (trial > 0) p = {pos(rng), pos(rng), pos(rng), pos(rng), pos(rng), pos(rng)};
        const auto q = quarter_car_matrices(p);
        const double ms = p.m_s, mu = p.m_u, bs = p.b_s, ks = p.k_s, kt = p.k_t, bt = p.b_t;
        const Matrix A{{0, 1, 0, -1},
                       {-ks / ms, -bs / ms, 0, bs / ms},
                       {0, 0, 0, 1},
                       {ks / mu, bs / mu, -kt / mu, -(bs + bt) / mu}};
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) CHECK(q.A(i, j) == doctest::Approx(A(i, j)).epsilon(1e-15));
        const Vector B{0, 1 / ms, 0, -1 / ms}, Bd{0, 0, -1, bt / mu};
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(q.B(i, 0) == doctest::Approx(B[i]).epsilon(1e-15));
            CHECK(q.Bd(i, 0) == doctest::Approx(Bd[i]).epsilon(1e-15));
        }
    }
    const auto q = quarter_car_matrices(QuarterCarPlant{});
    CHECK(q.A(1, 0) == doctest::Approx(-160.0 / 2.40));
    CHECK(q.Bd(3, 0) == 0.0);
    CHECK(eigenvalues(q.A).max_real_part() < 0.0);
    CHECK_THROWS_AS(quarter_car_matrices(QuarterCarPlant{-1.0}), Error);
}

TEST_CASE("quarter car as a regulated linear plant") {
    const auto plant = quarter_car_linear_plant(QuarterCarPlant{}, 4, Matrix(1, 4));
    CHECK(plant.P.rows() == 4);
    CHECK(plant.P.cols() == 4);
    CHECK(plant.P(2, 0) == -1.0);
    CHECK(plant.P(2, 1) == 0.0);
    CHECK(plant.C == Matrix{{1, 0, 0, 0}});
    CHECK(plant.F.max_abs() == 0.0);
}

TEST_CASE("Lorenz right-hand side") {
    LorenzPlant p;
    const Vector zero{0.0, 0.0};
    auto d = lorenz_rhs(p, zero, 0.0, zero, 0.0);
    CHECK(d.dz[0] == 0.0);
    CHECK(d.dz[1] == 0.0);
    CHECK(d.dy == 0.0);

    p.L_bar = {10.0, 8.0 / 3.0, -1.0};
    d = lorenz_rhs(p, Vector{1.0, 0.0}, 0.0, zero, 0.0);
    CHECK(d.dy == -1.0);

    // hand evaluation at a generic point
    p = LorenzPlant{};
    p.w = {0.5, 0.0, 1.0};
    p.b = 2.0;
    d = lorenz_rhs(p, Vector{1.5, -0.5}, 2.0, Vector{1.0, 0.0}, 0.25);
    CHECK(d.dz[0] == doctest::Approx(-10.5 * 1.5 + 10.5 * 2.0));
    CHECK(d.dz[1] == doctest::Approx(2.0 * 1.5 - (8.0 / 3.0) * -0.5));
    CHECK(d.dy == doctest::Approx(1.5 * (-27.0 + 0.5) - 2.0 + 2.0 * 0.25));

    LorenzPlantModel model(LorenzPlant{});
    CHECK(model.error(Vector{0.0, 0.0, 3.0}, Vector{10.0, 2.0}) == -7.0);

    LorenzPlant bad;
    bad.L_bar = {10.0, 8.0 / 3.0, 28.0};
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("Lorenz generator coefficients") {
    const auto a = lorenz_generator_coeffs(1.0);
    CHECK(a.values == Vector{9.0, 0.0, 10.0, 0.0});
    CHECK(lorenz_generator_coeffs(2.0).values == Vector{144.0, 0.0, 40.0, 0.0});
    CHECK(lorenz_exosystem_matrix(1.5) == Matrix{{0.0, 1.5}, {-1.5, 0.0}});
}

TEST_CASE("exosystem right-hand side") {
    const auto e = Exosystem::from_coeffs({4.0, 0.0}, {1.0, 0.0});
    CHECK(exosystem_rhs(e, Vector{1.0, 0.0}) == Vector{0.0, -4.0});
    CHECK(exosystem_rhs(e, Vector{0.0, 0.0}) == Vector{0.0, 0.0});
}

TEST_CASE("Example 2 road profile is the two-tone sin 2t + sin 5t") {
    const auto e = Exosystem::from_coeffs({100.0, 0.0, 29.0, 0.0}, {0.0, 7.0, 0.0, -133.0});
    IntegratorConfig cfg;
    cfg.method = IntegrationMethod::Rk45Adaptive;
    cfg.rel_tol = 1e-11;
    cfg.abs_tol = 1e-12;
    cfg.t_end = 10.0;
    cfg.sample_interval = 0.1;
    auto traj = integrate([&](double, std::span<const double> v, std::span<double> dv) {
        const Vector d = exosystem_rhs(e, v);
        std::copy(d.begin(), d.end(), dv.begin());
    }, e.v0, cfg);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double t = traj.times[k];
        CHECK(traj.states[k][0] == doctest::Approx(std::sin(2 * t) + std::sin(5 * t)).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("modal energies are conserved along the exosystem flow") {
    for (const CoeffVector& a : {CoeffVector{100.0, 0.0, 29.0, 0.0}, CoeffVector{0.0, 4.0, 0.0},
                                 CoeffVector{9.0, 0.0, 10.0, 0.0}}) {
        Vector v0(a.size());
        for (std::size_t i = 0; i < v0.size(); ++i) v0[i] = 1.0 + 0.5 * static_cast<double>(i);
        const auto e = Exosystem::from_coeffs(a, v0);
        IntegratorConfig cfg;
        cfg.method = IntegrationMethod::Rk45Adaptive;
        cfg.rel_tol = 1e-11;
        cfg.abs_tol = 1e-12;
        cfg.t_end = 20.0;
        cfg.sample_interval = 0.5;
        auto traj = integrate([&](double, std::span<const double> v, std::span<double> dv) {
            const Vector d = exosystem_rhs(e, v);
            std::copy(d.begin(), d.end(), dv.begin());
        }, v0, cfg);
        const Vector e0 = modal_energies(e, v0);
        CHECK(e0.size() == (a.size() + 1) / 2);
        for (const auto& v : traj.states) {
            const Vector ek = modal_energies(e, v);
            for (std::size_t i = 0; i < e0.size(); ++i) CHECK(ek[i] == doctest::Approx(e0[i]).epsilon(1e-7));
        }
    }
}
