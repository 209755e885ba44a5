#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "regulata/loops.hpp"
#include "regulata/scenario.hpp"

using namespace regulata;

namespace {

const std::string kScenarios = REGULATA_SCENARIO_DIR;

std::size_t column(const std::vector<std::string>& names, const std::string& name) {
    const auto it = std::find(names.begin(), names.end(), name);
    REQUIRE(it != names.end());
    return static_cast<std::size_t>(it - names.begin());
}

ScenarioConfig shortened(const std::string& file, double t_end) {
    auto cfg = load_scenario(kScenarios + "/" + file);
    cfg.integrator.t_end = t_end;
    return cfg;
}

} // namespace

TEST_CASE("Lorenz regulation wiring has 18 states") {
    const auto loop = build_loop(load_scenario(kScenarios + "/example1.cfg"));
    CHECK(loop->dim() == 18);
    CHECK(loop->state_names().size() == 18);
    CHECK(loop->derived(0.0, loop->initial_state()).size() == loop->derived_names().size());
}

TEST_CASE("observer wiring has 16 states") {
    const auto loop = build_loop(load_scenario(kScenarios + "/example2_observer.cfg"));
    CHECK(loop->dim() == 16);
}

TEST_CASE("feedforward wiring stacks x, v, eta, a_hat, zeta_hat") {
    const auto loop = build_loop(load_scenario(kScenarios + "/example2.cfg"));
    CHECK(loop->dim() == 4 + 4 + 8 + 4 + 20);
    CHECK(loop->breakpoints() == std::vector<double>{40.0});
}

TEST_CASE("zero initial conditions stay at the origin") {
    auto cfg = shortened("example1.cfg", 2.0);
    cfg.v0 = {0.0, 0.0};
    cfg.z0 = {0.0, 0.0};
    cfg.y0 = 0.0;
    const auto loop = build_loop(cfg);
    const auto traj = simulate(*loop, cfg.integrator);
    for (const auto& s : traj.states) {
        for (std::size_t i = 0; i + 1 < s.size(); ++i) CHECK(s[i] == 0.0);
        CHECK(s.back() == cfg.k_hat0);  // k_hat' = rho(0) * 0
    }
}

TEST_CASE("Lorenz loop: recorded u reproduces, k_hat nondecreasing") {
    const auto cfg = shortened("example1.cfg", 3.0);
    const auto loop = build_loop(cfg);
    const auto traj = simulate(*loop, cfg.integrator);
    const auto names = loop->derived_names();
    const std::size_t iu = column(names, "u"), ik = column(names, "k_hat");
    const auto& rl = dynamic_cast<const RegulationLoop&>(*loop);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const Vector again = loop->derived(traj.times[k], traj.states[k]);
        CHECK(again[iu] == traj.derived[k][iu]);
        CHECK(rl.control(traj.states[k]).u == traj.derived[k][iu]);
        if (k > 0) CHECK(traj.derived[k][ik] >= traj.derived[k - 1][ik]);
    }
}

TEST_CASE("feedforward loop: passive before t_on, recorded u reproduces") {
    auto cfg = shortened("example2.cfg", 2.0);
    cfg.t_on = 1.0;
    const auto loop = build_loop(cfg);
    const auto traj = simulate(*loop, cfg.integrator);
    const auto names = loop->derived_names();
    const std::size_t iu = column(names, "u");
    const auto& fl = dynamic_cast<const FeedforwardLoop&>(*loop);
    bool active_seen = false;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        if (traj.times[k] < 1.0) CHECK(traj.derived[k][iu] == 0.0);
        if (traj.times[k] > 1.0 && traj.derived[k][iu] != 0.0) active_seen = true;
        CHECK(fl.control(traj.times[k], traj.states[k]) == traj.derived[k][iu]);
        CHECK(loop->derived(traj.times[k], traj.states[k])[iu] == traj.derived[k][iu]);
    }
    CHECK(active_seen);
}

TEST_CASE("exact initialization: error decays as the plant's own homogeneous response") {
    // With zeta = zeta*, a_hat = a and eta = Q v the feedforward is exact and
    // x - X v obeys x~' = A x~, so e = C x~.
    auto cfg = shortened("example2.cfg", 5.0);
    cfg.t_on = 0.0;
    cfg.integrator.rel_tol = 1e-9;
    cfg.integrator.abs_tol = 1e-11;
    auto spec = InternalModelSpec::make(4, cfg.m);
    const Matrix q = spec.attach_exosystem(cfg.a);
    const auto plant = scenario_linear_plant(cfg);
    const auto exact = solve_regulator_static(assemble_regulator_system(plant, cfg.a), 4);
    cfg.a_hat0 = cfg.a.values;
    cfg.eta0 = q * cfg.v0;
    cfg.zeta0 = exact.zeta;
    const auto loop = build_loop(cfg);
    const auto traj = simulate(*loop, cfg.integrator);

    // oracle: x~(0) = x0 - X v0 propagated by the plant matrix alone
    Vector xt = cfg.x0;
    const Vector xv = exact.X * cfg.v0;
    for (std::size_t i = 0; i < 4; ++i) xt[i] -= xv[i];
    IntegratorConfig oc;
    oc.method = IntegrationMethod::Rk45Adaptive;
    oc.rel_tol = 1e-12;
    oc.abs_tol = 1e-14;
    oc.t_end = cfg.integrator.t_end;
    oc.sample_interval = cfg.integrator.sample_interval;
    const auto ref = integrate([&](double, std::span<const double> x, std::span<double> dx) {
        const Vector d = plant.A * x;
        std::copy(d.begin(), d.end(), dx.begin());
    }, xt, oc);

    const std::size_t ie = column(loop->derived_names(), "e");
    REQUIRE(ref.size() == traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k)
        CHECK(std::abs(traj.derived[k][ie] - ref.states[k][0]) < 1e-6);
}

TEST_CASE("no disturbance: regulation holds trivially") {
    auto cfg = shortened("example2.cfg", 20.0);
    cfg.kind = ScenarioKind::CustomLti;
    const auto qc = quarter_car_linear_plant(cfg.quarter_car, 4, Matrix(1, 4));
    cfg.A = qc.A;
    cfg.B = qc.B;
    cfg.P = Matrix(4, 4);
    cfg.C = qc.C;
    cfg.D = Matrix(1, 1);
    cfg.F = Matrix(1, 4);
    cfg.Kx = Matrix(1, 4);
    cfg.v0 = {0.0, 0.0, 0.0, 0.0};
    cfg.t_on = 0.0;
    const auto loop = build_loop(cfg);
    const auto traj = simulate(*loop, cfg.integrator);
    const auto e = traj.derived_column("e");
    CHECK(std::abs(e.back()) < 1e-4);
    for (double u : traj.derived_column("u")) CHECK(u == 0.0);
}

TEST_CASE("Lorenz sensitivity to the parameter offset w") {
    // With a large initial gain the adaptive loop regulates for offsets
    // that keep L1 > 0 and L3 < 0.
    for (const auto& w : {std::array<double, 3>{0.0, 0.0, 0.0}, std::array<double, 3>{2.0, -1.0, 5.0},
                          std::array<double, 3>{-3.0, 1.0, -4.0}}) {
        auto cfg = shortened("example1.cfg", 40.0);
        cfg.lorenz.w = w;
        cfg.k_hat0 = 1e4;
        cfg.integrator.rel_tol = 1e-6;
        cfg.integrator.abs_tol = 1e-8;
        const auto loop = build_loop(cfg);
        const auto traj = simulate(*loop, cfg.integrator);
        const auto e = traj.derived_column("e");
        double tail = 0.0;
        for (std::size_t k = 0; k < e.size(); ++k)
            if (traj.times[k] >= 36.0) tail = std::max(tail, std::abs(e[k]));
        CHECK(tail < 1e-2);
    }
}

TEST_CASE("padded frequencies") {
    const Vector f = padded_frequencies({100.0, 0.0, 29.0, 0.0}, 2);
    CHECK(f[0] == doctest::Approx(2.0));
    CHECK(f[1] == doctest::Approx(5.0));
    const Vector g = padded_frequencies({-1.0, 0.0, 0.0, 0.0}, 2);  // s^4 - 1: real roots +-1 and +-i
    CHECK(g.size() == 2);
    CHECK(std::isnan(g[1]));
}
