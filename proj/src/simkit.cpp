#include "regulata/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace regulata {

const char* to_string(IntegrationMethod m) noexcept {
    switch (m) {
    case IntegrationMethod::Rk4Fixed: return "rk4-fixed";
    case IntegrationMethod::Rk45Adaptive: return "rk45-adaptive";
    case IntegrationMethod::Rosenbrock23Adaptive: return "rosenbrock23-adaptive";
    }
    return "unknown";
}

IntegrationMethod parse_integration_method(const std::string& name) {
    if (name == "rk4-fixed") return IntegrationMethod::Rk4Fixed;
    if (name == "rk45-adaptive") return IntegrationMethod::Rk45Adaptive;
    if (name == "rosenbrock23-adaptive") return IntegrationMethod::Rosenbrock23Adaptive;
    fail(ErrorCode::ConfigError, "unknown integration method '" + name + "'");
}

void IntegratorConfig::validate() const {
    auto positive = [](double x, const char* what) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            fail(ErrorCode::ConfigError, std::string("integrator: ") + what + " must be positive");
        }
    };
    positive(dt, "dt");
    positive(abs_tol, "abs_tol");
    positive(rel_tol, "rel_tol");
    positive(dt_min, "dt_min");
    positive(dt_max, "dt_max");
    positive(sample_interval, "sample_interval");
    if (!(t_end > t_start)) fail(ErrorCode::ConfigError, "integrator: t_end must exceed t_start");
    if (dt_min > dt_max) fail(ErrorCode::ConfigError, "integrator: dt_min exceeds dt_max");
}

std::vector<double> Trajectory::derived_column(const std::string& name) const {
    const auto it = std::find(derived_names.begin(), derived_names.end(), name);
    if (it == derived_names.end()) {
        fail(ErrorCode::InvalidArgument, "trajectory has no derived signal '" + name + "'");
    }
    const auto idx = static_cast<std::size_t>(it - derived_names.begin());
    std::vector<double> col;
    col.reserve(derived.size());
    for (const auto& row : derived) col.push_back(row[idx]);
    return col;
}

std::vector<double> Trajectory::state_column(std::size_t index) const {
    std::vector<double> col;
    col.reserve(states.size());
    for (const auto& row : states) col.push_back(row.at(index));
    return col;
}

namespace {

void check_finite(std::span<const double> x, double t) {
    for (double v : x) {
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "state became non-finite at t = " << t;
            fail(ErrorCode::NonFiniteState, os.str());
        }
    }
}

// Evaluates the right-hand side with stage times clamped to the left limit
// of the current segment end when that end is a breakpoint.
class SegmentRhs {
public:
    SegmentRhs(const RhsFunction& f, IntegrationStats& stats) : f_(f), stats_(stats) {}

    void set_limit(double t_max) { t_max_ = t_max; }

    void operator()(double t, std::span<const double> x, std::span<double> dx) const {
        ++stats_.rhs_evaluations;
        f_(std::min(t, t_max_), x, dx);
    }

private:
    const RhsFunction& f_;
    IntegrationStats& stats_;
    double t_max_ = std::numeric_limits<double>::infinity();
};

class Stepper {
public:
    virtual ~Stepper() = default;
    // Advances x from t to b; may take several internal steps.
    virtual void advance(const SegmentRhs& f, double& t, Vector& x, double b) = 0;
    // The right-hand side changed discontinuously; drop cached evaluations.
    virtual void reset() {}
};

class Rk4Stepper final : public Stepper {
public:
    Rk4Stepper(double dt, std::size_t dim, IntegrationStats& stats)
        : dt_(dt), k1_(dim), k2_(dim), k3_(dim), k4_(dim), tmp_(dim), stats_(stats) {}

    void advance(const SegmentRhs& f, double& t, Vector& x, double b) override {
        const double span = b - t;
        const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt_ - 1e-9)));
        const double h = span / static_cast<double>(steps);
        const double t0 = t;
        const std::size_t n = x.size();
        for (std::size_t s = 0; s < steps; ++s) {
            const double ts = t0 + static_cast<double>(s) * h;
            f(ts, x, k1_);
            for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * h * k1_[i];
            f(ts + 0.5 * h, tmp_, k2_);
            for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * h * k2_[i];
            f(ts + 0.5 * h, tmp_, k3_);
            for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + h * k3_[i];
            f(ts + h, tmp_, k4_);
            for (std::size_t i = 0; i < n; ++i)
                x[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
            ++stats_.steps;
            check_finite(x, ts + h);
        }
        t = b;
    }

private:
    double dt_;
    Vector k1_, k2_, k3_, k4_, tmp_;
    IntegrationStats& stats_;
};

double error_norm(std::span<const double> err, std::span<const double> x0,
                  std::span<const double> x1, double atol, double rtol) {
    double s = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(x0[i]), std::abs(x1[i]));
        const double r = err[i] / sc;
        s += r * r;
    }
    return std::sqrt(s / static_cast<double>(std::max<std::size_t>(err.size(), 1)));
}

class AdaptiveStepper : public Stepper {
public:
    AdaptiveStepper(const IntegratorConfig& cfg, IntegrationStats& stats)
        : cfg_(cfg), stats_(stats), h_(std::min(cfg.dt, cfg.dt_max)) {}

    void advance(const SegmentRhs& f, double& t, Vector& x, double b) override {
        while (t < b) {
            const double remaining = b - t;
            const bool truncated = h_ >= remaining;
            const double h = truncated ? remaining : h_;
            double err = 0.0;
            const bool ok = attempt(f, t, x, h, err);
            if (!ok || err > 1.0) {
                ++stats_.rejected;
                const double factor = err > 0.0 && std::isfinite(err)
                                          ? std::max(0.2, 0.9 * std::pow(err, -1.0 / order()))
                                          : 0.2;
                h_ = h * factor;
                if (h_ < cfg_.dt_min) {
                    std::ostringstream os;
                    os << "adaptive step fell below dt_min = " << cfg_.dt_min << " at t = " << t;
                    fail(ErrorCode::StepUnderflow, os.str());
                }
                continue;
            }
            commit(x);
            t = truncated ? b : t + h;
            ++stats_.steps;
            check_finite(x, t);
            const double factor =
                err > 0.0 ? std::min(5.0, 0.9 * std::pow(err, -1.0 / order())) : 5.0;
            const double proposal = std::min(cfg_.dt_max, h * factor);
            // A step shortened to land on the segment end says nothing about
            // the admissible size.
            h_ = truncated ? std::max(h_, proposal) : proposal;
            h_ = std::min(h_, cfg_.dt_max);
        }
    }

protected:
    virtual bool attempt(const SegmentRhs& f, double t, const Vector& x, double h, double& err) = 0;
    virtual void commit(Vector& x) = 0;
    [[nodiscard]] virtual double order() const = 0;

    const IntegratorConfig& cfg_;
    IntegrationStats& stats_;
    double h_;
};

// Dormand-Prince 5(4) with first-same-as-last.
class DormandPrinceStepper final : public AdaptiveStepper {
public:
    DormandPrinceStepper(const IntegratorConfig& cfg, std::size_t dim, IntegrationStats& stats)
        : AdaptiveStepper(cfg, stats), k_(7, Vector(dim)), tmp_(dim), xnew_(dim), err_(dim) {}

    void reset() override { have_fsal_ = false; }

protected:
    bool attempt(const SegmentRhs& f, double t, const Vector& x, double h, double& err) override {
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
        const std::size_t n = x.size();
        if (!have_fsal_) {
            f(t, x, k_[0]);
            have_fsal_ = true;
        }
        auto stage = [&](std::initializer_list<std::pair<std::size_t, double>> terms) {
            for (std::size_t i = 0; i < n; ++i) {
                double s = x[i];
                for (const auto& [k, a] : terms) s += h * a * k_[k][i];
                tmp_[i] = s;
            }
        };
        stage({{0, a21}});
        f(t + c2 * h, tmp_, k_[1]);
        stage({{0, a31}, {1, a32}});
        f(t + c3 * h, tmp_, k_[2]);
        stage({{0, a41}, {1, a42}, {2, a43}});
        f(t + c4 * h, tmp_, k_[3]);
        stage({{0, a51}, {1, a52}, {2, a53}, {3, a54}});
        f(t + c5 * h, tmp_, k_[4]);
        stage({{0, a61}, {1, a62}, {2, a63}, {3, a64}, {4, a65}});
        f(t + h, tmp_, k_[5]);
        for (std::size_t i = 0; i < n; ++i)
            xnew_[i] = x[i] + h * (b1 * k_[0][i] + b3 * k_[2][i] + b4 * k_[3][i] +
                                   b5 * k_[4][i] + b6 * k_[5][i]);
        f(t + h, xnew_, k_[6]);
        for (std::size_t i = 0; i < n; ++i)
            err_[i] = h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] + e5 * k_[4][i] +
                           e6 * k_[5][i] + e7 * k_[6][i]);
        err = error_norm(err_, x, xnew_, cfg_.abs_tol, cfg_.rel_tol);
        return std::isfinite(err);
    }

    void commit(Vector& x) override {
        x = xnew_;
        std::swap(k_[0], k_[6]);
    }

    [[nodiscard]] double order() const override { return 5.0; }

private:
    std::vector<Vector> k_;
    Vector tmp_, xnew_, err_;
    bool have_fsal_ = false;
};

// Shampine-Reichelt Rosenbrock 2(3) (the ode23s scheme). W = I - h d J with
// a forward-difference Jacobian refreshed every step.
class RosenbrockStepper final : public AdaptiveStepper {
public:
    RosenbrockStepper(const IntegratorConfig& cfg, std::size_t dim, IntegrationStats& stats)
        : AdaptiveStepper(cfg, stats), n_(dim), f0_(dim), f1_(dim), f2_(dim), ft_(dim),
          k1_(dim), k2_(dim), k3_(dim), tmp_(dim), xnew_(dim), err_(dim), jac_(dim, dim) {}

    void reset() override { have_f0_ = false; }

protected:
    bool attempt(const SegmentRhs& f, double t, const Vector& x, double h, double& err) override {
        static const double d = 1.0 / (2.0 + std::sqrt(2.0));
        static const double e32 = 6.0 + std::sqrt(2.0);
        if (!have_f0_) {
            f(t, x, f0_);
            have_f0_ = true;
        }
        if (!jac_fresh_) refresh_jacobian(f, t, x);

        Matrix w(n_, n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) w(i, j) = (i == j ? 1.0 : 0.0) - h * d * jac_(i, j);
        LuFactorization lu(std::move(w));
        if (lu.singular()) {
            err = std::numeric_limits<double>::infinity();
            return false;
        }
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = f0_[i] + h * d * dfdt_[i];
        k1_ = lu.solve(tmp_);
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = x[i] + 0.5 * h * k1_[i];
        f(t + 0.5 * h, tmp_, f1_);
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = f1_[i] - k1_[i];
        k2_ = lu.solve(tmp_);
        for (std::size_t i = 0; i < n_; ++i) {
            k2_[i] += k1_[i];
            xnew_[i] = x[i] + h * k2_[i];
        }
        f(t + h, xnew_, f2_);
        for (std::size_t i = 0; i < n_; ++i)
            tmp_[i] = f2_[i] - e32 * (k2_[i] - f1_[i]) - 2.0 * (k1_[i] - f0_[i]) + h * d * dfdt_[i];
        k3_ = lu.solve(tmp_);
        for (std::size_t i = 0; i < n_; ++i) err_[i] = h / 6.0 * (k1_[i] - 2.0 * k2_[i] + k3_[i]);
        err = error_norm(err_, x, xnew_, cfg_.abs_tol, cfg_.rel_tol);
        return std::isfinite(err);
    }

    void commit(Vector& x) override {
        x = xnew_;
        std::swap(f0_, f2_);
        jac_fresh_ = false;
    }

    [[nodiscard]] double order() const override { return 3.0; }

private:
    void refresh_jacobian(const SegmentRhs& f, double t, const Vector& x) {
        ++stats_.jacobian_evaluations;
        const double sq = std::sqrt(std::numeric_limits<double>::epsilon());
        tmp_ = x;
        for (std::size_t j = 0; j < n_; ++j) {
            const double delta = sq * std::max(std::abs(x[j]), 1e-3);
            tmp_[j] = x[j] + delta;
            f(t, tmp_, ft_);
            tmp_[j] = x[j];
            for (std::size_t i = 0; i < n_; ++i) jac_(i, j) = (ft_[i] - f0_[i]) / delta;
        }
        const double dt = sq * std::max(std::abs(t), 1.0);
        f(t + dt, x, ft_);
        dfdt_.assign(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) dfdt_[i] = (ft_[i] - f0_[i]) / dt;
        jac_fresh_ = true;
    }

    std::size_t n_;
    Vector f0_, f1_, f2_, ft_, k1_, k2_, k3_, tmp_, xnew_, err_, dfdt_;
    Matrix jac_;
    bool have_f0_ = false;
    bool jac_fresh_ = false;
};

} // namespace

Trajectory integrate(const RhsFunction& rhs, Vector x0, const IntegratorConfig& cfg) {
    cfg.validate();
    check_finite(x0, cfg.t_start);
    Trajectory traj;
    const std::size_t dim = x0.size();

    std::unique_ptr<Stepper> stepper;
    switch (cfg.method) {
    case IntegrationMethod::Rk4Fixed:
        stepper = std::make_unique<Rk4Stepper>(cfg.dt, dim, traj.stats);
        break;
    case IntegrationMethod::Rk45Adaptive:
        stepper = std::make_unique<DormandPrinceStepper>(cfg, dim, traj.stats);
        break;
    case IntegrationMethod::Rosenbrock23Adaptive:
        stepper = std::make_unique<RosenbrockStepper>(cfg, dim, traj.stats);
        break;
    }

    std::vector<double> breaks;
    for (double b : cfg.breakpoints)
        if (b > cfg.t_start && b < cfg.t_end) breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());

    // Output grid t_start + k * interval, computed without accumulation.
    const auto samples = static_cast<std::size_t>(
        std::floor((cfg.t_end - cfg.t_start) / cfg.sample_interval + 1e-9));
    std::vector<double> grid;
    grid.reserve(samples + 2);
    for (std::size_t k = 0; k <= samples; ++k)
        grid.push_back(cfg.t_start + static_cast<double>(k) * cfg.sample_interval);
    if (cfg.t_end - grid.back() > 1e-12 * std::max(1.0, std::abs(cfg.t_end))) grid.push_back(cfg.t_end);

    traj.times.reserve(grid.size());
    traj.states.reserve(grid.size());
    traj.times.push_back(grid.front());
    traj.states.push_back(x0);

    SegmentRhs f(rhs, traj.stats);
    double t = cfg.t_start;
    Vector x = std::move(x0);
    std::size_t next_break = 0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double target = grid[k];
        while (t < target) {
            double stop = target;
            bool at_break = false;
            if (next_break < breaks.size() && breaks[next_break] <= target) {
                stop = breaks[next_break];
                at_break = true;
            }
            f.set_limit(at_break ? std::nextafter(stop, -std::numeric_limits<double>::infinity())
                                 : std::numeric_limits<double>::infinity());
            if (stop > t) stepper->advance(f, t, x, stop);
            t = stop;
            if (at_break) {
                ++next_break;
                stepper->reset();
            }
        }
        traj.times.push_back(target);
        traj.states.push_back(x);
    }
    return traj;
}

ConvergenceReport fit_exponential_rate(std::span<const double> times, std::span<const double> signal,
                                       double window_start, double window_end,
                                       double settle_threshold) {
    if (times.size() != signal.size()) {
        fail(ErrorCode::ShapeMismatch, "fit_exponential_rate: times and signal differ in length");
    }
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < window_start || times[i] > window_end) continue;
        const double y = std::log(std::max(std::abs(signal[i]), 1e-14));
        st += times[i];
        sy += y;
        stt += times[i] * times[i];
        sty += times[i] * y;
        ++count;
    }
    if (count < 3) fail(ErrorCode::WindowTooShort, "fit_exponential_rate: fewer than 3 samples in window");
    const double c = static_cast<double>(count);
    const double denom = c * stt - st * st;
    if (!(denom > 0.0)) fail(ErrorCode::WindowTooShort, "fit_exponential_rate: degenerate window");

    ConvergenceReport rep;
    rep.exp_rate = (c * sty - st * sy) / denom;
    rep.final_error = signal.empty() ? 0.0 : std::abs(signal.back());
    rep.settle_time = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = signal.size(); i-- > 0;) {
        if (!(std::abs(signal[i]) < settle_threshold)) break;
        rep.settle_time = times[i];
    }
    return rep;
}

double rms_over(std::span<const double> times, std::span<const double> signal, double t0, double t1) {
    double s = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t0 || times[i] > t1) continue;
        s += signal[i] * signal[i];
        ++count;
    }
    if (count == 0) fail(ErrorCode::WindowTooShort, "rms_over: empty window");
    return std::sqrt(s / static_cast<double>(count));
}

} // namespace regulata
