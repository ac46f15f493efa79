#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "strip/errors.hpp"
#include "strip/grid.hpp"
#include "strip/reaction.hpp"
#include "strip/stationary.hpp"

namespace strip {

/// Front-like initial data phi(x - sigma), non-increasing from 1 to 0.
struct InitialData {
    enum class Family { Step, LogisticFront };

    Family family = Family::Step;
    double shift = 0.0;     ///< sigma
    double steepness = 1.0; ///< k of the logistic front

    static InitialData step(double sigma) { return {Family::Step, sigma, 1.0}; }
    static InitialData logistic(double k, double sigma) { return {Family::LogisticFront, sigma, k}; }

    InitialData shifted(double sigma) const
    {
        InitialData d = *this;
        d.shift = sigma;
        return d;
    }

    /// Rejects a logistic rate equal to either tail rate of the stationary
    /// solutions; on a truncated grid this guard is all that remains of the
    /// decay-rate separation the convergence theory asks for.
    void validate(double alpha) const
    {
        if (!std::isfinite(shift))
            throw DomainError("initial shift must be finite");
        if (family == Family::LogisticFront) {
            if (!(steepness > 0.0) || !std::isfinite(steepness))
                throw DomainError("logistic front needs k > 0");
            for (double rate : {std::sqrt(alpha), std::sqrt(1.0 - alpha)})
                if (std::abs(steepness - rate) <= 1e-12 * rate)
                    throw DomainError("logistic rate k must differ from sqrt(alpha) and sqrt(1 - alpha)");
        }
    }

    /// Nodal value; the step is averaged over the node's cell [x - h/2, x + h/2]
    /// so the discrete data depend continuously and monotonically on sigma.
    double value(double x, double h) const
    {
        if (family == Family::LogisticFront) {
            const double z = steepness * (x - shift);
            return z > 0.0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
        }
        const double lo = x - 0.5 * h;
        const double hi = x + 0.5 * h;
        if (shift <= lo)
            return 0.0;
        if (shift >= hi)
            return 1.0;
        return (shift - lo) / h;
    }
};

inline std::string_view to_string(InitialData::Family f)
{
    return f == InitialData::Family::Step ? "step" : "logistic";
}

inline InitialData::Family parse_family(std::string_view name)
{
    if (name == "step")
        return InitialData::Family::Step;
    if (name == "logistic")
        return InitialData::Family::LogisticFront;
    throw DomainError("unknown initial-data family '" + std::string(name) + "' (expected step or logistic)");
}

struct SimConfig {
    double dt = 1e-2;
    double t_max = 400.0;
    double steady_tol = 1e-6;     ///< on sup |u(t+1) - u(t)|
    double snapshot_every = 0.0;  ///< 0: no intermediate snapshots
    bool reaction = true;         ///< false gives the pure heat equation
    double plateau_margin = 5e-2; ///< Lipschitz bound taken on [0, 1 + margin]

    void validate(double alpha) const
    {
        if (!(dt > 0.0) || !std::isfinite(dt))
            throw DomainError("dt must be positive");
        if (!(t_max > 0.0))
            throw DomainError("t_max must be positive");
        if (!(steady_tol > 0.0))
            throw DomainError("steady_tol must be positive");
        if (snapshot_every < 0.0)
            throw DomainError("snapshot_every must be non-negative");
        const double lip = std::max(1.0, reaction_lipschitz(alpha, 1.0 + plateau_margin));
        if (reaction && dt * lip > 1.0)
            throw DomainError("dt = " + std::to_string(dt) + " exceeds the monotonicity bound 1/Lip(f) = " +
                              std::to_string(1.0 / lip));
    }
};

struct Field {
    Grid1D grid;
    std::vector<double> u;
    double t = 0.0;
};

inline Field make_initial(const InitialData& data, const Grid1D& grid)
{
    Field f{grid, std::vector<double>(grid.size()), 0.0};
    const double h = grid.spacing();
    for (std::size_t i = 0; i < grid.size(); ++i)
        f.u[i] = data.value(grid.node(i), h);
    return f;
}

/// Field sampled from a stationary profile (interpolated when grids differ).
inline Field field_from_profile(const StationaryProfile& prof, const Grid1D& grid)
{
    Field f{grid, std::vector<double>(grid.size()), 0.0};
    const bool same = prof.x.size() == grid.size() && !prof.x.empty() && prof.x.front() == grid.x_min() &&
                      prof.x.back() == grid.node(grid.size() - 1);
    for (std::size_t i = 0; i < grid.size(); ++i)
        f.u[i] = same ? prof.v[i] : prof.value_at(grid.node(i));
    return f;
}

/// Backward Euler for u_xx with zero-flux ghost nodes, explicit reaction.
///
/// With dt * Lip(f) <= 1 the step is a monotone map: the tridiagonal matrix is
/// an M-matrix and u + dt f(x, u) is non-decreasing in u, so ordered data stay
/// ordered and [0, max(1, sup u0)] is invariant.
class ImexStepper {
public:
    ImexStepper(const ModelParams& p, const Grid1D& grid, const SimConfig& cfg)
        : p_(p), grid_(grid), dt_(cfg.dt), reaction_(cfg.reaction)
    {
        cfg.validate(p.alpha());
        const std::size_t n = grid.size();
        const double r = cfg.dt / (grid.spacing() * grid.spacing());
        // rows: sub a_i, diag b_i, super c_i; ghost rows double the inward coupling
        std::vector<double> a(n, -r), b(n, 1.0 + 2.0 * r), c(n, -r);
        c[0] = -2.0 * r;
        a[n - 1] = -2.0 * r;
        sub_ = a;
        cprime_.resize(n);
        denom_.resize(n);
        denom_[0] = b[0];
        cprime_[0] = c[0] / denom_[0];
        for (std::size_t i = 1; i < n; ++i) {
            denom_[i] = b[i] - a[i] * cprime_[i - 1];
            if (!(denom_[i] > 0.0))
                throw NumericalError("singular diffusion matrix");
            cprime_[i] = i + 1 < n ? c[i] / denom_[i] : 0.0;
        }
        strip_.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            strip_[i] = p.in_strip(grid.node(i)) ? 1 : 0;
    }

    double dt() const noexcept { return dt_; }

    void step(Field& f) const
    {
        const std::size_t n = f.u.size();
        if (n != grid_.size())
            throw DomainError("field does not live on the stepper's grid");
        std::vector<double>& u = f.u;
        if (reaction_) {
            const double alpha = p_.alpha();
            for (std::size_t i = 0; i < n; ++i)
                u[i] += dt_ * (strip_[i] ? -u[i] : bistable(alpha, u[i]));
        }
        // forward sweep in place, then back substitution
        u[0] /= denom_[0];
        for (std::size_t i = 1; i < n; ++i)
            u[i] = (u[i] - sub_[i] * u[i - 1]) / denom_[i];
        for (std::size_t i = n - 1; i-- > 0;)
            u[i] -= cprime_[i] * u[i + 1];
        f.t += dt_;
    }

private:
    ModelParams p_;
    Grid1D grid_;
    double dt_;
    bool reaction_;
    std::vector<double> sub_, cprime_, denom_;
    std::vector<char> strip_;
};

struct EvolveHooks {
    /// Called at t = 0 and every cfg.snapshot_every time units (when > 0).
    std::function<void(const Field&)> snapshot;
    /// Called once per unit time; returning true stops the run early.
    std::function<bool(const Field&)> unit_time;
};

struct EvolveResult {
    bool steady = false;
    bool stopped_early = false;
    double last_increment = std::numeric_limits<double>::infinity(); ///< sup |u(t) - u(t-1)|
};

/// Steps until the unit-time sup increment drops below steady_tol or t_max is
/// reached. Asserts the discrete maximum principle and finiteness each step.
inline EvolveResult evolve(Field& f, const ModelParams& p, const SimConfig& cfg, const EvolveHooks& hooks = {})
{
    const ImexStepper stepper(p, f.grid, cfg);
    const double upper = std::max(1.0, *std::max_element(f.u.begin(), f.u.end()));
    if (*std::min_element(f.u.begin(), f.u.end()) < 0.0)
        throw DomainError("initial field must be non-negative");
    const auto per_unit = static_cast<std::size_t>(std::max(1.0, std::round(1.0 / cfg.dt)));
    const std::size_t per_snapshot =
        cfg.snapshot_every > 0.0 ? static_cast<std::size_t>(std::max(1.0, std::round(cfg.snapshot_every / cfg.dt)))
                                 : 0;
    const auto total = static_cast<std::size_t>(std::ceil(cfg.t_max / cfg.dt - 1e-9));

    EvolveResult res;
    if (hooks.snapshot)
        hooks.snapshot(f);
    std::vector<double> previous = f.u;
    const double t0 = f.t;
    for (std::size_t k = 1; k <= total; ++k) {
        stepper.step(f);
        f.t = t0 + static_cast<double>(k) * cfg.dt; // no drift from repeated addition
        for (double v : f.u) {
            if (!std::isfinite(v))
                throw NumericalError("non-finite value at t = " + std::to_string(f.t));
            if (v < -1e-12 || v > upper + 1e-12)
                throw NumericalError("discrete maximum principle violated at t = " + std::to_string(f.t) +
                                     " (value " + std::to_string(v) + ")");
        }
        if (per_snapshot && k % per_snapshot == 0 && hooks.snapshot)
            hooks.snapshot(f);
        if (k % per_unit == 0) {
            double inc = 0.0;
            for (std::size_t i = 0; i < f.u.size(); ++i)
                inc = std::max(inc, std::abs(f.u[i] - previous[i]));
            res.last_increment = inc / (static_cast<double>(per_unit) * cfg.dt);
            previous = f.u;
            if (hooks.unit_time && hooks.unit_time(f)) {
                res.stopped_early = true;
                return res;
            }
            if (res.last_increment < cfg.steady_tol) {
                res.steady = true;
                return res;
            }
        }
    }
    return res;
}

/// Window [lo, hi] for sup_distance.
struct Window {
    double lo;
    double hi;
};

/// max over field nodes in the window of |u - v|.
inline double sup_distance(const Field& f, const StationaryProfile& prof, Window w)
{
    if (!(w.lo < w.hi))
        throw DomainError("window must satisfy lo < hi");
    if (w.lo < f.grid.x_min() || w.hi > f.grid.x_max())
        throw DomainError("window lies outside the field grid");
    if (prof.x.empty() || w.lo < prof.x.front() || w.hi > prof.x.back())
        throw DomainError("window lies outside the profile samples");
    const bool same = prof.x.size() == f.u.size() && prof.x.front() == f.grid.x_min() &&
                      prof.x.back() == f.grid.node(f.grid.size() - 1);
    double d = 0.0;
    for (std::size_t i = 0; i < f.u.size(); ++i) {
        const double x = f.grid.node(i);
        if (x < w.lo || x > w.hi)
            continue;
        d = std::max(d, std::abs(f.u[i] - (same ? prof.v[i] : prof.value_at(x))));
    }
    return d;
}

} // namespace strip
