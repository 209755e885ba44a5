#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "regulata/error.hpp"
#include "regulata/imodel.hpp"
#include "regulata/simkit.hpp"

using namespace regulata;

namespace {

const Vector kExample2M{1, 8, 28, 56, 70, 56, 28, 8};

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

TEST_CASE("internal model right-hand side") {
    auto spec = InternalModelSpec::make(1, {2.0, 3.0});
    CHECK(internal_model_rhs(spec, Vector{0, 0}, 0.0) == Vector{0, 0});
    CHECK(internal_model_rhs(spec, Vector{0, 0}, 1.0) == Vector{0, 1});
    CHECK(internal_model_rhs(spec, Vector{1, 0}, 0.0) == Vector{0, -2});
    CHECK(code_of([] { InternalModelSpec::make(1, {-2.0, 3.0}); }) == ErrorCode::HurwitzViolation);
    CHECK(code_of([] { InternalModelSpec::make(2, {1.0, 2.0}); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("chi for the trivial generator") {
    auto spec = InternalModelSpec::make(1, {2.0, 3.0});
    CHECK(chi(spec, Vector{1.5, -4.0}, CoeffVector{0.0}) == doctest::Approx(3.0));
    CHECK(chi(spec, Vector{0.0, 0.0}, CoeffVector{7.0}) == 0.0);
    CHECK(reconstruct_output(spec, Vector{1.5, -4.0}, CoeffVector{0.0}) == doctest::Approx(3.0));
}

TEST_CASE("chi reconstructs Gamma xi along a simulated generator") {
    auto spec2 = InternalModelSpec::make(2, {1.0, 4.0, 6.0, 4.0});
    const CoeffVector a{4.0, 0.0};
    const Matrix q = spec2.attach_exosystem(a);
    IntegratorConfig cfg;
    cfg.method = IntegrationMethod::Rk45Adaptive;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    cfg.t_end = 5.0;
    cfg.sample_interval = 0.25;
    const Matrix phi = companion(a);
    auto traj = integrate([&](double, std::span<const double> x, std::span<double> dx) {
        const Vector d = phi * x;
        std::copy(d.begin(), d.end(), dx.begin());
    }, {1.0, 0.5}, cfg);
    int checked = 0;
    for (const auto& xi : traj.states) {
        const Vector eta = q * xi;
        const auto est = direct_a_estimate(eta);
        if (!est) continue;
        ++checked;
        CHECK(std::abs(chi(spec2, eta, *est) - xi[0]) <= 1e-8);
    }
    CHECK(checked > 10);
}

TEST_CASE("smooth step and saturation") {
    CHECK(bump(0.0) == 0.0);
    CHECK(bump(-1.0) == 0.0);
    CHECK(bump(1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(smooth_step(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(smooth_step(0.0) == 0.0);
    CHECK(smooth_step(1.0) == 1.0);
    CHECK(smooth_step(2.0) == 1.0);
    CHECK(smooth_step(0.3) + smooth_step(0.7) == doctest::Approx(1.0));

    auto spec = InternalModelSpec::make(1, {2.0, 3.0});
    const CoeffVector a{0.0};
    SaturationConfig sat{4.0};
    // ||(eta, a)||^2 = 5 = delta + 1: switched off exactly
    CHECK(chi_saturated(spec, Vector{2.0, 1.0}, a, sat) == 0.0);
    // ||.||^2 = 2 <= delta: untouched
    CHECK(chi_saturated(spec, Vector{1.0, 1.0}, a, sat) == chi(spec, Vector{1.0, 1.0}, a));
    // in between: strictly damped
    const double mid = chi_saturated(spec, Vector{2.0, 0.5}, a, sat);
    CHECK(mid > 0.0);
    CHECK(mid < chi(spec, Vector{2.0, 0.5}, a));
}

TEST_CASE("learning flow hand example") {
    const Vector eta{1, 2, 3, 4};
    CHECK(learning_rhs(eta, CoeffVector{0.0, 0.0}, 1.0) == Vector{-11.0, -18.0});
    CHECK(learning_rhs(eta, CoeffVector{0.0, 0.0}, 2.5) == Vector{-27.5, -45.0});
    CHECK(learning_rhs(Vector{0, 0, 0, 0}, CoeffVector{3.0, -1.0}, 1.0) == Vector{0.0, 0.0});
    // a consistent with the recurrence is an equilibrium
    const Vector d = learning_rhs(eta, CoeffVector{1.0, -2.0}, 1.0);
    CHECK(std::abs(d[0]) < 1e-14);
    CHECK(std::abs(d[1]) < 1e-14);
}

TEST_CASE("learning flow is the negative gradient of its loss") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + trial % 4;
        Vector eta(2 * n), av(n);
        for (auto& x : eta) x = g(rng);
        for (auto& x : av) x = g(rng);
        const double k1 = 0.5 + trial;
        const Vector rhs = learning_rhs(eta, CoeffVector(av), k1);
        for (std::size_t i = 0; i < n; ++i) {
            const double h = 1e-6 * std::max(1.0, std::abs(av[i]));
            Vector ap = av, am = av;
            ap[i] += h;
            am[i] -= h;
            const double grad = (learning_loss(eta, CoeffVector(ap)) - learning_loss(eta, CoeffVector(am))) / (2 * h);
            CHECK(std::abs(rhs[i] + k1 * grad) <= 1e-5 * std::max(1.0, std::abs(rhs[i])));
        }
    }
}

TEST_CASE("direct estimate") {
    const auto est = direct_a_estimate(Vector{1, 2, 3, 4});
    REQUIRE(est);
    CHECK((*est)[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK((*est)[1] == doctest::Approx(-2.0).epsilon(1e-14));
    // recurrence theta3 = -a1 theta1 - a2 theta2, theta4 = -a1 theta2 - a2 theta3
    CHECK(-(*est)[0] * 1 - (*est)[1] * 2 == doctest::Approx(3.0));
    CHECK(-(*est)[0] * 2 - (*est)[1] * 3 == doctest::Approx(4.0));
    CHECK_FALSE(direct_a_estimate(Vector{0, 0, 0, 0}));
}

TEST_CASE("direct estimate recovers the Example 2 generator from exact data") {
    auto spec = InternalModelSpec::make(4, kExample2M);
    const CoeffVector a{100.0, 0.0, 29.0, 0.0};
    const Matrix q = spec.attach_exosystem(a);
    const Vector eta = q * Vector{0.0, 7.0, 0.0, -133.0};
    const auto est = direct_a_estimate(eta);
    REQUIRE(est);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs((*est)[i] - a[i]) < 1e-7 * 100.0);
}

TEST_CASE("frequencies from coefficients") {
    auto f = frequencies_from_a({100.0, 0.0, 29.0, 0.0});
    REQUIRE(f.omegas.size() == 2);
    CHECK(f.omegas[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(f.omegas[1] == doctest::Approx(5.0).epsilon(1e-10));
    CHECK_FALSE(f.bias_present);

    f = frequencies_from_a({4.0, 0.0});
    REQUIRE(f.omegas.size() == 1);
    CHECK(f.omegas[0] == doctest::Approx(2.0));

    // s^3 + 4 s: roots 0 and +-2i
    f = frequencies_from_a({0.0, 4.0, 0.0});
    REQUIRE(f.omegas.size() == 1);
    CHECK(f.omegas[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(f.bias_present);
}

TEST_CASE("two-tone closed form") {
    const auto w = two_tone_frequencies({100.0, 0.0, 29.0, 0.0});
    REQUIRE(w);
    CHECK(w->first == doctest::Approx(2.0));
    CHECK(w->second == doctest::Approx(5.0));
    CHECK_FALSE(two_tone_frequencies({100.0, 0.0, 10.0, 0.0}));  // negative discriminant
}

TEST_CASE("attach_exosystem rejects overlapping spectra") {
    // M has eigenvalues -1 and -2; Phi = -a1 = -1 meets the first
    auto spec = InternalModelSpec::make(1, {2.0, 3.0});
    CHECK(code_of([&] { spec.attach_exosystem({1.0}); }) == ErrorCode::NoUniqueSolution);
}
