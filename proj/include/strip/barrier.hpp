#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "strip/errors.hpp"
#include "strip/grid.hpp"
#include "strip/orbit.hpp"
#include "strip/reaction.hpp"
#include "strip/roots.hpp"
#include "strip/stationary.hpp"

namespace strip {

struct BarrierOptions {
    double delta = 1e-2;             ///< slope magnitude where the left piece crosses v = 1
    double eps0 = 5e-2;              ///< plateau margin above 1
    std::size_t scan_points = 2000;  ///< junction values screened in closed form
    std::size_t candidates = 64;     ///< admissible junction values sampled on the grid
    OrbitTolerances tol{};
};

/// Piecewise weak upper solution: plateau 1 + eps0 left of -Lbar, the
/// decreasing outer orbit of energy delta^2/2 + F(1) down to x = -L, a
/// solution of v'' = v across the strip, and a closed orbit inside the
/// homoclinic loop for x >= L.
struct Barrier {
    StationaryProfile profile;
    double epsilon = 0.0;      ///< one third of min(Vbar - Vs) over the grid
    double floor = 0.0;        ///< min over the grid of Vbar
    double corner_jump = 0.0;  ///< Vbar'(-Lbar - 0) - Vbar'(-Lbar + 0)
    PhaseState junction_left{};  ///< state at x = -L
    PhaseState junction_right{}; ///< state at x = L
    double periodic_min = 0.0;
    double periodic_max = 0.0;
    std::string note;
};

namespace detail {

struct BarrierShape {
    double v_left, w_left, v_right, w_right, energy_right;
};

/// Closed-form screen: the junction value vD at -L is admissible when the
/// strip piece stays positive and lands strictly inside the homoclinic loop.
inline std::optional<BarrierShape> barrier_shape(const ModelParams& p, double delta, double v_left)
{
    const double alpha = p.alpha();
    const double span = 2.0 * p.half_width();
    const double w_left = -std::sqrt(delta * delta + 2.0 * potential_gap_to_one(alpha, 1.0 - v_left));
    const double vr = v_left * std::cosh(span) + w_left * std::sinh(span);
    const double wr = v_left * std::sinh(span) + w_left * std::cosh(span);
    // minimum of A e^y + B e^-y on [0, span]
    double vmin = std::min(v_left, vr);
    const double A = 0.5 * (v_left + w_left), B = 0.5 * (v_left - w_left);
    if (A > 0.0 && B > 0.0) {
        const double y = 0.5 * std::log(B / A);
        if (y > 0.0 && y < span)
            vmin = std::min(vmin, 2.0 * std::sqrt(A * B));
    }
    const double e = 0.5 * wr * wr + outer_potential(alpha, vr);
    if (!(vmin > 0.0) || !(e < 0.0) || !(vr > 0.0))
        return std::nullopt;
    return BarrierShape{v_left, w_left, vr, wr, e};
}

inline Barrier sample_barrier(const ModelParams& p, const BarrierShape& shape, const BarrierOptions& opt,
                              const Grid1D& grid)
{
    const double alpha = p.alpha();
    const double L = p.half_width();
    const double top = 1.0 + opt.eps0;

    const PhaseState start{top, -std::sqrt(opt.delta * opt.delta + 2.0 * potential_gap_to_one(alpha, -opt.eps0))};
    const OuterOrbit left(alpha, start, opt.tol);
    const auto left_hit = left.run_until(StopCondition::value_falling(shape.v_left));
    const double corner = -L - left_hit.s;

    const OuterOrbit right(alpha, {shape.v_right, shape.w_right}, opt.tol);

    Barrier out;
    StationaryProfile& prof = out.profile;
    prof.kind = ProfileKind::Barrier;
    prof.params = p;
    prof.plateau_level = top;
    prof.corner = corner;
    prof.breakpoints = {corner, -L, L};
    prof.matching_dw = std::abs(left_hit.state[1] - shape.w_left);

    const auto xs = grid.nodes();
    std::vector<double> s_left, s_right;
    for (double x : xs) {
        if (x > corner && x <= -L)
            s_left.push_back(left_hit.s + (x + L));
        else if (x >= L)
            s_right.push_back(x - L);
    }
    const auto ls = left.sample(s_left);
    const auto rs = right.sample(s_right);
    std::size_t il = 0, ir = 0;
    for (double x : xs) {
        double v, dv, d2v;
        if (x <= corner) {
            v = top;
            dv = 0.0;
            d2v = 0.0;
        } else if (x <= -L) {
            v = ls[il][0];
            dv = ls[il][1];
            ++il;
            d2v = -bistable(alpha, v);
        } else if (x < L) {
            const double y = x + L;
            v = shape.v_left * std::cosh(y) + shape.w_left * std::sinh(y);
            dv = shape.v_left * std::sinh(y) + shape.w_left * std::cosh(y);
            d2v = v;
        } else {
            v = rs[ir][0];
            dv = rs[ir][1];
            ++ir;
            d2v = -bistable(alpha, v);
        }
        prof.x.push_back(x);
        prof.v.push_back(v);
        prof.dv.push_back(dv);
        prof.d2v.push_back(d2v);
    }

    out.junction_left = {shape.v_left, shape.w_left};
    out.junction_right = {shape.v_right, shape.w_right};
    out.corner_jump = 0.0 - start[1];
    const double th = theta(alpha);
    const double e = shape.energy_right;
    auto level = [&](double v) { return outer_potential(alpha, v) - e; };
    out.periodic_min = bisect(level, 0.0, alpha, 1e-14, "barrier periodic minimum");
    out.periodic_max = bisect(level, alpha, th, 1e-14, "barrier periodic maximum");
    prof.a = out.periodic_min;
    prof.period = std::nullopt;
    out.floor = *std::min_element(prof.v.begin(), prof.v.end());
    out.note = "left piece follows the decreasing orbit through (1, -delta), continued above 1 up to the plateau";
    return out;
}

inline double min_gap(const StationaryProfile& upper, const StationaryProfile& lower)
{
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < upper.size(); ++i)
        gap = std::min(gap, upper.v[i] - lower.v[i]);
    return gap;
}

} // namespace detail

/// Builds the barrier Vbar for L > L* and reports the separation
/// min(Vbar - Vs) >= 3 epsilon from the small solution on the same grid.
///
/// The strip junction value at -L is the one free parameter; among the
/// admissible values it is chosen to maximise the separation from Vs.
inline Barrier build_barrier(const ModelParams& p, const Grid1D& grid, const BarrierOptions& opt = {})
{
    if (!(opt.delta > 0.0) || !(opt.eps0 > 0.0))
        throw DomainError("barrier requires delta > 0 and eps0 > 0");
    const double Lc = critical_half_width(p.alpha());
    if (!(p.half_width() > Lc) || detail::near_critical(p.half_width(), Lc))
        throw RegimeError("barrier requires L > L* = " + std::to_string(Lc));

    std::vector<detail::BarrierShape> admissible;
    double best_energy = std::numeric_limits<double>::infinity();
    PhaseState closest{};
    const double top = 1.0 + opt.eps0;
    for (std::size_t i = 1; i < opt.scan_points; ++i) {
        const double vd = top * static_cast<double>(i) / static_cast<double>(opt.scan_points);
        if (auto shape = detail::barrier_shape(p, opt.delta, vd)) {
            admissible.push_back(*shape);
        } else {
            const double span = 2.0 * p.half_width();
            const double wl = -std::sqrt(opt.delta * opt.delta + 2.0 * potential_gap_to_one(p.alpha(), 1.0 - vd));
            const double vr = vd * std::cosh(span) + wl * std::sinh(span);
            const double wr = vd * std::sinh(span) + wl * std::cosh(span);
            const double e = 0.5 * wr * wr + outer_potential(p.alpha(), vr);
            if (vr > 0.0 && e < best_energy) {
                best_energy = e;
                closest = {vr, wr};
            }
        }
    }
    if (admissible.empty()) {
        std::ostringstream msg;
        msg << "barrier construction failed: no junction value in (0, " << top
            << ") lands inside the homoclinic loop; lowest attempted energy " << best_energy << " at (v, v') = ("
            << closest[0] << ", " << closest[1] << ")";
        throw NumericalError(msg.str());
    }

    const StationaryProfile vs = build_profile(ProfileKind::Small, p, grid, opt.tol);
    std::optional<Barrier> best;
    double best_gap = -std::numeric_limits<double>::infinity();
    const std::size_t m = std::min(opt.candidates, admissible.size());
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t idx = m == 1 ? admissible.size() / 2 : k * (admissible.size() - 1) / (m - 1);
        Barrier b = detail::sample_barrier(p, admissible[idx], opt, grid);
        const double gap = detail::min_gap(b.profile, vs);
        if (gap > best_gap) {
            best_gap = gap;
            best = std::move(b);
        }
    }
    if (!(best_gap > 0.0))
        throw NumericalError("barrier construction failed: no admissible barrier lies above the small solution");
    best->epsilon = best_gap / 3.0;
    return std::move(*best);
}

/// min over samples away from breakpoints of -v'' - f(x, v), with v'' from
/// the ODE of each piece; non-negative for a weak upper solution.
inline double upper_solution_defect(const StationaryProfile& prof, const ModelParams& p)
{
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < prof.size(); ++i) {
        const double x = prof.x[i];
        const bool on_break = std::any_of(prof.breakpoints.begin(), prof.breakpoints.end(),
                                          [&](double b) { return x == b; });
        if (on_break)
            continue;
        worst = std::min(worst, -prof.d2v[i] - reaction_value(p, x, prof.v[i]));
    }
    return worst;
}

} // namespace strip
