#include "regulata/loops.hpp"

#include <cmath>
#include <limits>

namespace regulata {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::span<const double> slice(std::span<const double> x, std::size_t off, std::size_t len) {
    return x.subspan(off, len);
}

void append_indexed(std::vector<std::string>& names, const std::string& stem, std::size_t count) {
    for (std::size_t i = 1; i <= count; ++i) names.push_back(stem + std::to_string(i));
}

Vector or_zeros(const Vector& v, std::size_t n, const char* what) {
    if (v.empty()) return Vector(n, 0.0);
    if (v.size() != n) fail(ErrorCode::ShapeMismatch, std::string("initial ") + what + " has wrong length");
    return v;
}

double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

// ||eta - Q v|| when Q is known.
double eta_tilde(const InternalModelSpec& spec, std::span<const double> eta, std::span<const double> v) {
    if (!spec.Q) return kNaN;
    const Vector qv = *spec.Q * v;
    return distance(eta, qv);
}

void observer_rhs(const InternalModelSpec& spec, double k1, std::span<const double> eta,
                  std::span<const double> a_hat, double input, std::span<double> deta,
                  std::span<double> da) {
    const std::size_t ne = eta.size();
    for (std::size_t i = 0; i < ne; ++i) {
        double s = spec.N(i, 0) * input;
        for (std::size_t j = 0; j < ne; ++j) s += spec.M(i, j) * eta[j];
        deta[i] = s;
    }
    const Vector d = learning_rhs(eta, CoeffVector(Vector(a_hat.begin(), a_hat.end())), k1);
    std::copy(d.begin(), d.end(), da.begin());
}

void append_frequency_block(Vector& out, std::span<const double> a_hat,
                            const std::optional<CoeffVector>& a_true, std::size_t n_freq) {
    const CoeffVector ah(Vector(a_hat.begin(), a_hat.end()));
    out.push_back(a_true ? distance(a_hat, a_true->values) : kNaN);
    for (double v : a_hat) out.push_back(v);
    const Vector w = padded_frequencies(ah, n_freq);
    out.insert(out.end(), w.begin(), w.end());
}

} // namespace

Vector padded_frequencies(const CoeffVector& a_hat, std::size_t count) {
    Vector out(count, kNaN);
    try {
        const auto est = frequencies_from_a(a_hat);
        for (std::size_t i = 0; i < count && i < est.omegas.size(); ++i) out[i] = est.omegas[i];
    } catch (const Error&) {
        // Transient estimates may have no consistent spectrum; report NaN.
    }
    return out;
}

Trajectory simulate(const ClosedLoop& loop, IntegratorConfig cfg) {
    for (double b : loop.breakpoints()) cfg.breakpoints.push_back(b);
    const ClosedLoop* lp = &loop;
    RhsFunction f = [lp](double t, std::span<const double> x, std::span<double> dx) {
        lp->rhs(t, x, dx);
    };
    Trajectory traj = integrate(f, loop.initial_state(), cfg);
    traj.state_names = loop.state_names();
    traj.derived_names = loop.derived_names();
    traj.derived.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k)
        traj.derived.push_back(loop.derived(traj.times[k], traj.states[k]));
    return traj;
}

// --- regulation --------------------------------------------------------

RegulationLoop::RegulationLoop(RegulationLoopConfig cfg) : cfg_(std::move(cfg)) {
    if (!cfg_.plant) fail(ErrorCode::InvalidArgument, "regulation loop: no plant");
    if (!(cfg_.k1 > 0.0)) fail(ErrorCode::InvalidArgument, "regulation loop: k1 must be positive");
    nx_ = cfg_.plant->state_dim();
    nv_ = cfg_.exo.dim();
    neta_ = cfg_.spec.state_dim();
    na_ = cfg_.spec.n;
    adaptive_ = cfg_.gain.mode == GainMode::Adaptive;
    dim_ = nx_ + nv_ + neta_ + na_ + (adaptive_ ? 1 : 0);
    if (cfg_.x0.size() != nx_) fail(ErrorCode::ShapeMismatch, "regulation loop: x0 has wrong length");
    cfg_.eta0 = or_zeros(cfg_.eta0, neta_, "eta");
    cfg_.a_hat0 = or_zeros(cfg_.a_hat0, na_, "a_hat");
    if (cfg_.a_true && cfg_.a_true->size() != na_) {
        fail(ErrorCode::ShapeMismatch, "regulation loop: true a has wrong length");
    }
}

Vector RegulationLoop::initial_state() const {
    Vector s;
    s.reserve(dim_);
    s.insert(s.end(), cfg_.x0.begin(), cfg_.x0.end());
    s.insert(s.end(), cfg_.exo.v0.begin(), cfg_.exo.v0.end());
    s.insert(s.end(), cfg_.eta0.begin(), cfg_.eta0.end());
    s.insert(s.end(), cfg_.a_hat0.begin(), cfg_.a_hat0.end());
    if (adaptive_) s.push_back(cfg_.gain.k_hat);
    return s;
}

RegulationLoop::Control RegulationLoop::control(std::span<const double> x) const {
    const auto xs = slice(x, 0, nx_);
    const auto v = slice(x, nx_, nv_);
    const auto eta = slice(x, nx_ + nv_, neta_);
    const auto ah = slice(x, nx_ + nv_ + neta_, na_);
    Control c{};
    c.e = cfg_.plant->error(xs, v);
    c.chi = chi_saturated(cfg_.spec, eta, CoeffVector(Vector(ah.begin(), ah.end())), cfg_.sat);
    c.u = adaptive_ ? control_adaptive(cfg_.gain, x[dim_ - 1], c.e, c.chi)
                    : control_fixed(cfg_.gain, c.e, c.chi);
    return c;
}

void RegulationLoop::rhs(double t, std::span<const double> x, std::span<double> dx) const {
    const Control c = control(x);
    const auto v = slice(x, nx_, nv_);
    cfg_.plant->rhs(t, slice(x, 0, nx_), c.u, v, dx.subspan(0, nx_));
    const Vector dv = exosystem_rhs(cfg_.exo, v);
    std::copy(dv.begin(), dv.end(), dx.begin() + static_cast<std::ptrdiff_t>(nx_));
    observer_rhs(cfg_.spec, cfg_.k1, slice(x, nx_ + nv_, neta_), slice(x, nx_ + nv_ + neta_, na_), c.u,
                 dx.subspan(nx_ + nv_, neta_), dx.subspan(nx_ + nv_ + neta_, na_));
    if (adaptive_) dx[dim_ - 1] = adaptive_gain_rhs(cfg_.gain, c.e);
}

std::vector<std::string> RegulationLoop::state_names() const {
    std::vector<std::string> names;
    append_indexed(names, "x", nx_);
    append_indexed(names, "v", nv_);
    append_indexed(names, "eta", neta_);
    append_indexed(names, "a_hat_state", na_);
    if (adaptive_) names.emplace_back("k_hat_state");
    return names;
}

std::vector<std::string> RegulationLoop::derived_names() const {
    std::vector<std::string> names{"e", "u", "chi", "k_hat", "abar_norm"};
    append_indexed(names, "a_hat", na_);
    append_indexed(names, "omega_hat", na_ / 2);
    return names;
}

Vector RegulationLoop::derived(double, std::span<const double> x) const {
    const Control c = control(x);
    Vector out{c.e, c.u, c.chi, adaptive_ ? x[dim_ - 1] : cfg_.gain.k};
    append_frequency_block(out, slice(x, nx_ + nv_ + neta_, na_), cfg_.a_true, na_ / 2);
    return out;
}

// --- observer ----------------------------------------------------------

ObserverLoop::ObserverLoop(ObserverLoopConfig cfg) : cfg_(std::move(cfg)) {
    if (!(cfg_.k1 > 0.0)) fail(ErrorCode::InvalidArgument, "observer loop: k1 must be positive");
    nv_ = cfg_.exo.dim();
    neta_ = cfg_.spec.state_dim();
    na_ = cfg_.spec.n;
    if (nv_ != na_) fail(ErrorCode::ShapeMismatch, "observer loop: exosystem order must equal n");
    cfg_.eta0 = or_zeros(cfg_.eta0, neta_, "eta");
    cfg_.a_hat0 = or_zeros(cfg_.a_hat0, na_, "a_hat");
    if (!cfg_.spec.Q) cfg_.spec.attach_exosystem(cfg_.exo.a);
}

Vector ObserverLoop::initial_state() const {
    Vector s(cfg_.exo.v0);
    s.insert(s.end(), cfg_.eta0.begin(), cfg_.eta0.end());
    s.insert(s.end(), cfg_.a_hat0.begin(), cfg_.a_hat0.end());
    return s;
}

void ObserverLoop::rhs(double, std::span<const double> x, std::span<double> dx) const {
    const auto v = slice(x, 0, nv_);
    const Vector dv = exosystem_rhs(cfg_.exo, v);
    std::copy(dv.begin(), dv.end(), dx.begin());
    observer_rhs(cfg_.spec, cfg_.k1, slice(x, nv_, neta_), slice(x, nv_ + neta_, na_), v[0],
                 dx.subspan(nv_, neta_), dx.subspan(nv_ + neta_, na_));
}

std::vector<std::string> ObserverLoop::state_names() const {
    std::vector<std::string> names;
    append_indexed(names, "v", nv_);
    append_indexed(names, "eta", neta_);
    append_indexed(names, "a_hat_state", na_);
    return names;
}

std::vector<std::string> ObserverLoop::derived_names() const {
    std::vector<std::string> names{"y0", "y_hat", "eta_tilde_norm", "abar_norm"};
    append_indexed(names, "a_hat", na_);
    append_indexed(names, "omega_hat", na_ / 2);
    names.insert(names.end(), {"direct_available", "direct_error", "cond_theta"});
    return names;
}

Vector ObserverLoop::derived(double, std::span<const double> x) const {
    const auto v = slice(x, 0, nv_);
    const auto eta = slice(x, nv_, neta_);
    const auto ah = slice(x, nv_ + neta_, na_);
    Vector out{v[0], reconstruct_output(cfg_.spec, eta, CoeffVector(Vector(ah.begin(), ah.end()))),
               eta_tilde(cfg_.spec, eta, v)};
    append_frequency_block(out, ah, cfg_.exo.a, na_ / 2);
    const auto direct = direct_a_estimate(eta, cfg_.direct_cond_cap);
    out.push_back(direct ? 1.0 : 0.0);
    out.push_back(direct ? distance(direct->values, cfg_.exo.a.values) : kNaN);
    out.push_back(condition_number(hankel(eta)));
    return out;
}

// --- feedforward -------------------------------------------------------

FeedforwardLoop::FeedforwardLoop(FeedforwardLoopConfig cfg) : cfg_(std::move(cfg)) {
    if (!(cfg_.k1 > 0.0) || !(cfg_.k2 > 0.0)) {
        fail(ErrorCode::InvalidArgument, "feedforward loop: k1 and k2 must be positive");
    }
    nx_ = cfg_.plant.nx();
    nv_ = cfg_.exo.dim();
    neta_ = cfg_.spec.state_dim();
    na_ = cfg_.spec.n;
    nz_ = (nx_ + 1) * na_;
    if (nv_ != na_ || cfg_.plant.nv() != nv_) {
        fail(ErrorCode::ShapeMismatch, "feedforward loop: exosystem order must equal n and P columns");
    }
    if (cfg_.x0.size() != nx_) fail(ErrorCode::ShapeMismatch, "feedforward loop: x0 has wrong length");
    cfg_.eta0 = or_zeros(cfg_.eta0, neta_, "eta");
    cfg_.a_hat0 = or_zeros(cfg_.a_hat0, na_, "a_hat");
    cfg_.zeta0 = or_zeros(cfg_.zeta0, nz_, "zeta");
    if (!cfg_.spec.Q) cfg_.spec.attach_exosystem(cfg_.exo.a);
    sys_ = assemble_regulator_system(cfg_.plant, cfg_.exo.a);
    exact_ = solve_regulator_static(sys_, nx_, cfg_.k2);
    exact_norm_ = norm2(exact_.zeta);
}

Vector FeedforwardLoop::initial_state() const {
    Vector s(cfg_.x0);
    for (const Vector* part : {&cfg_.exo.v0, &cfg_.eta0, &cfg_.a_hat0, &cfg_.zeta0})
        s.insert(s.end(), part->begin(), part->end());
    return s;
}

std::vector<double> FeedforwardLoop::breakpoints() const {
    if (cfg_.t_on > 0.0) return {cfg_.t_on};
    return {};
}

double FeedforwardLoop::control(double t, std::span<const double> x) const {
    if (t < cfg_.t_on) return 0.0;
    const auto ah = slice(x, a_hat_offset(), na_);
    const auto z = slice(x, zeta_offset(), nz_);
    const auto sol = RegulatorSolution::from_zeta(Vector(z.begin(), z.end()), nx_, na_, cfg_.k2);
    return feedforward_control(cfg_.plant, sol, cfg_.spec, slice(x, nx_ + nv_, neta_),
                               CoeffVector(Vector(ah.begin(), ah.end())), slice(x, 0, nx_));
}

void FeedforwardLoop::rhs(double t, std::span<const double> x, std::span<double> dx) const {
    const double u = control(t, x);
    const auto& p = cfg_.plant;
    const auto xs = slice(x, 0, nx_);
    const auto v = slice(x, nx_, nv_);
    for (std::size_t i = 0; i < nx_; ++i) {
        double s = p.B(i, 0) * u;
        for (std::size_t j = 0; j < nx_; ++j) s += p.A(i, j) * xs[j];
        for (std::size_t j = 0; j < nv_; ++j) s += p.P(i, j) * v[j];
        dx[i] = s;
    }
    const Vector dv = exosystem_rhs(cfg_.exo, v);
    std::copy(dv.begin(), dv.end(), dx.begin() + static_cast<std::ptrdiff_t>(nx_));
    const auto ah = slice(x, a_hat_offset(), na_);
    observer_rhs(cfg_.spec, cfg_.k1, slice(x, nx_ + nv_, neta_), ah, v[0], dx.subspan(nx_ + nv_, neta_),
                 dx.subspan(a_hat_offset(), na_));
    const Matrix acal = regulator_matrix(p, CoeffVector(Vector(ah.begin(), ah.end())));
    const Vector dz = gradient_flow_rhs(slice(x, zeta_offset(), nz_), acal, sys_.Bcal, cfg_.k2);
    std::copy(dz.begin(), dz.end(), dx.begin() + static_cast<std::ptrdiff_t>(zeta_offset()));
}

std::vector<std::string> FeedforwardLoop::state_names() const {
    std::vector<std::string> names;
    append_indexed(names, "x", nx_);
    append_indexed(names, "v", nv_);
    append_indexed(names, "eta", neta_);
    append_indexed(names, "a_hat_state", na_);
    append_indexed(names, "zeta", nz_);
    return names;
}

std::vector<std::string> FeedforwardLoop::derived_names() const {
    std::vector<std::string> names{"e", "u", "eta_tilde_norm", "abar_norm"};
    append_indexed(names, "a_hat", na_);
    append_indexed(names, "omega_hat", na_ / 2);
    names.insert(names.end(), {"residual_norm", "zeta_rel_error"});
    return names;
}

Vector FeedforwardLoop::derived(double t, std::span<const double> x) const {
    const auto xs = slice(x, 0, nx_);
    const auto v = slice(x, nx_, nv_);
    const auto ah = slice(x, a_hat_offset(), na_);
    const auto z = slice(x, zeta_offset(), nz_);
    double e = 0.0;
    for (std::size_t j = 0; j < nx_; ++j) e += cfg_.plant.C(0, j) * xs[j];
    for (std::size_t j = 0; j < nv_; ++j) e += cfg_.plant.F(0, j) * v[j];
    Vector out{e, control(t, x), eta_tilde(cfg_.spec, slice(x, nx_ + nv_, neta_), v)};
    append_frequency_block(out, ah, cfg_.exo.a, na_ / 2);
    const Matrix acal = regulator_matrix(cfg_.plant, CoeffVector(Vector(ah.begin(), ah.end())));
    Vector r = acal * z;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= sys_.Bcal[i];
    out.push_back(norm2(r));
    out.push_back(distance(z, exact_.zeta) / (exact_norm_ > 0.0 ? exact_norm_ : 1.0));
    return out;
}

} // namespace regulata
