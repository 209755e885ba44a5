#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "regulata/error.hpp"
#include "regulata/regulator.hpp"
#include "regulata/simkit.hpp"

using namespace regulata;

TEST_CASE("even polynomial") {
    const EvenPolynomial rho({1.0, 1.0});
    CHECK(rho(0.0) == 1.0);
    CHECK(rho(2.0) == 5.0);
    CHECK(rho(-2.0) == 5.0);
    CHECK(EvenPolynomial({1.0, 0.0, 2.0})(1.5) == doctest::Approx(1.0 + 2.0 * std::pow(1.5, 4)));
    CHECK_THROWS_AS(EvenPolynomial({0.5}), Error);
    CHECK_THROWS_AS(EvenPolynomial({1.0, -1.0}), Error);
    CHECK(EvenPolynomial(std::vector<double>{})(3.0) == 1.0);  // empty means rho = 1
}

TEST_CASE("fixed gain control law") {
    const auto g = GainLaw::fixed(2.0, EvenPolynomial({1.0, 1.0}));
    CHECK(control_fixed(g, 0.0, 0.7) == 0.7);
    CHECK(control_fixed(g, 1.0, 0.0) == -4.0);
    for (double e : {0.1, 0.9, 3.0}) CHECK(control_fixed(g, -e, 0.0) == -control_fixed(g, e, 0.0));
    CHECK_THROWS_AS(GainLaw::fixed(-1.0, EvenPolynomial()), Error);
}

TEST_CASE("adaptive gain law") {
    const auto g = GainLaw::adaptive(1.0, EvenPolynomial({1.0, 1.0}));
    CHECK(adaptive_gain_rhs(g, 0.0) == 0.0);
    CHECK(adaptive_gain_rhs(g, 1.0) == 2.0);
    for (double e = -5.0; e <= 5.0; e += 0.25) CHECK(adaptive_gain_rhs(g, e) >= 0.0);
    CHECK(control_adaptive(g, 3.0, 1.0, 0.5) == doctest::Approx(-5.5));
}

TEST_CASE("fixed law on e' = -e + u shrinks |e| monotonically") {
    const auto g = GainLaw::fixed(2.0, EvenPolynomial({1.0, 1.0}));
    IntegratorConfig cfg;
    cfg.t_end = 3.0;
    cfg.dt = 1e-3;
    cfg.sample_interval = 1e-2;
    auto traj = integrate([&](double, std::span<const double> x, std::span<double> dx) {
        dx[0] = -x[0] + control_fixed(g, x[0], 0.0);
    }, {1.5}, cfg);
    for (std::size_t k = 1; k < traj.size(); ++k)
        CHECK(std::abs(traj.states[k][0]) < std::abs(traj.states[k - 1][0]));
}
