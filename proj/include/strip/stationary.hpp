#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "strip/errors.hpp"
#include "strip/grid.hpp"
#include "strip/orbit.hpp"
#include "strip/phase_plane.hpp"
#include "strip/reaction.hpp"
#include "strip/roots.hpp"

namespace strip {

enum class ProfileKind { Big, Small, Ground, CompactBump, Periodic, Barrier };

inline std::string_view to_string(ProfileKind k)
{
    switch (k) {
    case ProfileKind::Big: return "big";
    case ProfileKind::Small: return "small";
    case ProfileKind::Ground: return "ground";
    case ProfileKind::CompactBump: return "bump";
    case ProfileKind::Periodic: return "periodic";
    case ProfileKind::Barrier: return "barrier";
    }
    return "unknown";
}

inline ProfileKind parse_profile_kind(std::string_view name)
{
    for (auto k : {ProfileKind::Big, ProfileKind::Small, ProfileKind::Ground, ProfileKind::CompactBump,
                   ProfileKind::Periodic, ProfileKind::Barrier})
        if (to_string(k) == name)
            return k;
    throw DomainError("unknown profile kind '" + std::string(name) + "'");
}

/// Deviation from the limit state at which outer pieces switch to their
/// linearised exponential tails.
inline constexpr double kTailSwitch = 1e-8;
/// Largest tolerated jump of v or v' across a junction.
inline constexpr double kMatchingTol = 1e-8;

/// A sampled stationary solution (or barrier) together with its construction data.
struct StationaryProfile {
    ProfileKind kind = ProfileKind::Big;
    ModelParams params = ModelParams::without_strip(0.25);
    double a = 0.0;            ///< well parameter (minimum of the cosh piece, bump peak, orbit minimum)
    double center_shift = 0.0; ///< centre of the cosh middle piece
    std::vector<double> x;
    std::vector<double> v;
    std::vector<double> dv;
    std::vector<double> d2v;   ///< v'' taken from the ODE of the piece each sample belongs to
    std::vector<double> breakpoints; ///< points where v'' may jump

    std::optional<double> x_min_point;    ///< ground: interior minimum x1
    std::optional<double> x_max_point;    ///< ground: maximum x2 > L
    std::optional<double> support_radius; ///< bump: v(+-x0) = 0
    std::optional<double> period;         ///< periodic orbit
    std::optional<double> plateau_level;  ///< barrier: 1 + eps0
    std::optional<double> corner;         ///< barrier: -Lbar

    double matching_dv = 0.0; ///< worst |jump of v| over the junctions
    double matching_dw = 0.0; ///< worst |jump of v'| over the junctions

    std::size_t size() const noexcept { return x.size(); }

    /// Cubic Hermite interpolation of (v, v'); constant beyond the sampled range.
    double value_at(double xq) const
    {
        if (x.empty())
            throw DomainError("empty profile");
        if (xq <= x.front())
            return v.front();
        if (xq >= x.back())
            return v.back();
        const auto it = std::upper_bound(x.begin(), x.end(), xq);
        const auto i = static_cast<std::size_t>(std::distance(x.begin(), it)) - 1;
        const double h = x[i + 1] - x[i];
        const double t = (xq - x[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * v[i] + (t3 - 2 * t2 + t) * h * dv[i] + (-2 * t3 + 3 * t2) * v[i + 1] +
               (t3 - t2) * h * dv[i + 1];
    }
};

namespace detail {

/// One outer arm leaving a saddle, integrated outward from kTailSwitch and
/// continued backwards by its linearised exponential tail.
class SaddleArm {
public:
    enum class Saddle { One, Zero };

    SaddleArm(double alpha, Saddle saddle, OrbitTolerances tol)
        : saddle_(saddle), rate_(saddle == Saddle::One ? std::sqrt(1.0 - alpha) : std::sqrt(alpha)),
          orbit_(alpha, start_state(alpha, saddle), tol)
    {
    }

    const OuterOrbit& orbit() const noexcept { return orbit_; }

    /// States at canonical parameters s (any order); s < 0 lies on the tail.
    std::vector<PhaseState> states(std::span<const double> s) const
    {
        std::vector<std::size_t> order(s.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](auto i, auto j) { return s[i] < s[j]; });
        std::vector<double> positive;
        for (auto i : order)
            if (s[i] >= 0.0)
                positive.push_back(s[i]);
        const auto sampled = orbit_.sample(positive);
        std::vector<PhaseState> out(s.size());
        std::size_t k = 0;
        for (auto i : order) {
            if (s[i] < 0.0)
                out[i] = tail(s[i]);
            else
                out[i] = sampled[k++];
        }
        return out;
    }

private:
    static PhaseState start_state(double alpha, Saddle saddle)
    {
        const double d = kTailSwitch;
        if (saddle == Saddle::One)
            return {1.0 - d, -std::sqrt(2.0 * potential_gap_to_one(alpha, d))};
        return {d, std::sqrt(-2.0 * outer_potential(alpha, d))};
    }

    PhaseState tail(double s) const
    {
        const double dev = kTailSwitch * std::exp(rate_ * s);
        if (saddle_ == Saddle::One)
            return {1.0 - dev, -rate_ * dev};
        return {dev, rate_ * dev};
    }

    Saddle saddle_;
    double rate_;
    OuterOrbit orbit_;
};

inline bool near_critical(double half_width, double critical)
{
    return std::abs(half_width - critical) <= 1e-12 * critical;
}

} // namespace detail

/// Well parameter a of the big solution: R(a) = L.
inline double solve_a_big(const ModelParams& p)
{
    const double L = p.half_width();
    if (!(L > 0.0))
        throw DomainError("big solution requires L > 0");
    double lo = 1e-3;
    while (big_span(p.alpha(), lo) <= L) {
        lo *= 1e-3;
        if (lo < 1e-290)
            throw NumericalError("solve_a_big: strip too wide to bracket R(a) = L");
    }
    const double hi = 1.0 - 1e-15;
    if (big_span(p.alpha(), hi) >= L)
        return hi;
    return bisect([&](double a) { return big_span(p.alpha(), a) - L; }, lo, hi, 1e-10, "solve_a_big");
}

/// Well parameter a of the small solution: ell(a) = 2L, a in (0, theta].
inline double solve_a_small(const ModelParams& p)
{
    const double L = p.half_width();
    const double Lc = critical_half_width(p.alpha());
    const double th = theta(p.alpha());
    if (detail::near_critical(L, Lc))
        return th;
    if (L < Lc)
        throw RegimeError("small solution requires L >= L* = " + std::to_string(Lc) + ", got L = " +
                          std::to_string(L));
    double lo = 1e-3 * th;
    while (ell(p.alpha(), lo) <= 2.0 * L) {
        lo *= 1e-3;
        if (lo < 1e-290)
            throw NumericalError("solve_a_small: strip too wide to bracket ell(a) = 2L");
    }
    return bisect([&](double a) { return ell(p.alpha(), a) - 2.0 * L; }, lo, th, 1e-10, "solve_a_small");
}

/// Well parameter a of the transition solution: R(a) + r(a) = 2L, a in (0, theta).
inline double solve_a_ground(const ModelParams& p)
{
    const double L = p.half_width();
    const double Lc = critical_half_width(p.alpha());
    const double th = theta(p.alpha());
    if (L <= Lc || detail::near_critical(L, Lc))
        throw RegimeError("transition solution requires L > L* = " + std::to_string(Lc) + ", got L = " +
                          std::to_string(L));
    double lo = 1e-3 * th;
    while (ground_span(p.alpha(), lo) <= 2.0 * L) {
        lo *= 1e-3;
        if (lo < 1e-290)
            throw NumericalError("solve_a_ground: strip too wide to bracket R + r = 2L");
    }
    // r(a) ~ sqrt(theta - a): bisect in u = sqrt(theta - a), where the map is regular
    auto g = [&](double u) { return ground_span(p.alpha(), th - u * u) - 2.0 * L; };
    const double u = bisect(g, 0.0, std::sqrt(th - lo), 1e-10, "solve_a_ground");
    return th - u * u;
}

/// Builds one of the three strip-crossing stationary solutions on the grid nodes.
///
/// The middle piece is a cosh(x - c); the outer pieces are translates of the
/// heteroclinic into (1, 0) and of the homoclinic loop at (0, 0), integrated
/// outward from the saddles so the junction is reached along the
/// numerically stable direction.
///
/// `small_well` selects a specific root of ell(a) = 2L for the Small kind when
/// several exist (see small_wells); by default the one of solve_a_small.
inline StationaryProfile build_profile(ProfileKind kind, const ModelParams& p, const Grid1D& grid,
                                       OrbitTolerances tol = {}, std::optional<double> small_well = {})
{
    using detail::SaddleArm;
    const double alpha = p.alpha();
    const double L = p.half_width();

    StationaryProfile prof;
    prof.kind = kind;
    prof.params = p;
    bool at_tangency = false;
    switch (kind) {
    case ProfileKind::Big:
        prof.a = solve_a_big(p);
        prof.center_shift = 0.0;
        break;
    case ProfileKind::Small: {
        prof.a = small_well ? *small_well : solve_a_small(p);
        if (small_well && std::abs(ell(alpha, prof.a) - 2.0 * L) > 1e-8 * L)
            throw DomainError("requested small well does not satisfy ell(a) = 2L");
        const SpanTable t = spans(alpha, prof.a);
        prof.center_shift = 0.5 * (t.big_span + *t.small_span);
        at_tangency = prof.a == theta(alpha);
        break;
    }
    case ProfileKind::Ground: {
        prof.a = solve_a_ground(p);
        prof.center_shift = 0.5 * *spans(alpha, prof.a).ell;
        prof.x_min_point = prof.center_shift;
        break;
    }
    default:
        throw DomainError("build_profile handles the big, small and ground kinds only");
    }
    const double a = prof.a;
    const double c = prof.center_shift;

    // Left arm: heteroclinic leaving (1,0), stopped at the value of the middle piece at -L.
    const SaddleArm left(alpha, SaddleArm::Saddle::One, tol);
    const double v_left = a * std::cosh(-L - c);
    const auto left_hit = left.orbit().run_until(StopCondition::value_falling(v_left));
    const double w_left_mid = a * std::sinh(-L - c);
    prof.matching_dw = std::abs(left_hit.state[1] - w_left_mid);

    // Right arm: mirrored heteroclinic for Big, homoclinic for Small/Ground.
    std::optional<SaddleArm> right;
    OuterOrbit::Hit right_hit;
    const double v_right = a * std::cosh(L - c);
    const double w_right_mid = a * std::sinh(L - c);
    if (kind == ProfileKind::Big) {
        right_hit = left_hit;
    } else {
        right.emplace(alpha, SaddleArm::Saddle::Zero, tol);
        StopCondition stop = StopCondition::value_rising(v_right);
        if (kind == ProfileKind::Ground)
            stop = StopCondition::value_falling(v_right);
        else if (at_tangency)
            stop = StopCondition::peak();
        right_hit = right->orbit().run_until(stop);
        // x increases while the canonical parameter decreases: v'(x) = -w(s).
        prof.matching_dw = std::max(prof.matching_dw, std::abs(-right_hit.state[1] - w_right_mid));
        prof.matching_dv = std::abs(right_hit.state[0] - v_right);
        if (kind == ProfileKind::Ground) {
            const auto peak = right->orbit().run_until(StopCondition::peak());
            prof.x_max_point = L + (right_hit.s - peak.s);
        }
    }
    if (prof.matching_dv > kMatchingTol || prof.matching_dw > kMatchingTol)
        throw NumericalError("matching violation at the strip edge: |dv| = " + std::to_string(prof.matching_dv) +
                             ", |dv'| = " + std::to_string(prof.matching_dw));

    const auto xs = grid.nodes();
    std::vector<double> s_left, s_right;
    for (double x : xs) {
        if (x <= -L)
            s_left.push_back(left_hit.s + (x + L));
        else if (x >= L)
            s_right.push_back(kind == ProfileKind::Big ? left_hit.s + (-x + L) : right_hit.s - (x - L));
    }
    const auto left_states = left.states(s_left);
    const auto right_states = kind == ProfileKind::Big ? left.states(s_right) : right->states(s_right);

    prof.x = xs;
    prof.v.resize(xs.size());
    prof.dv.resize(xs.size());
    prof.d2v.resize(xs.size());
    std::size_t il = 0, ir = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        if (x <= -L) {
            prof.v[i] = left_states[il][0];
            prof.dv[i] = left_states[il][1];
            ++il;
            prof.d2v[i] = -bistable(alpha, prof.v[i]);
        } else if (x >= L) {
            prof.v[i] = right_states[ir][0];
            prof.dv[i] = -right_states[ir][1];
            ++ir;
            prof.d2v[i] = -bistable(alpha, prof.v[i]);
        } else {
            prof.v[i] = a * std::cosh(x - c);
            prof.dv[i] = a * std::sinh(x - c);
            prof.d2v[i] = prof.v[i];
        }
    }
    prof.breakpoints = {-L, L};
    return prof;
}

/// Even bistable bump with peak a in (theta, 1), supported on [-x0, x0].
inline StationaryProfile build_compact_bump(double alpha, double a, const Grid1D& grid, OrbitTolerances tol = {})
{
    const double th = theta(alpha);
    if (!(a > th && a < 1.0))
        throw DomainError("compact bump requires theta(alpha) < a < 1, got a = " + std::to_string(a));
    const OuterOrbit orbit(alpha, {a, 0.0}, tol);
    const auto hit = orbit.run_until(StopCondition::value_falling(0.0));
    const double x0 = hit.s;

    StationaryProfile prof;
    prof.kind = ProfileKind::CompactBump;
    prof.params = ModelParams::without_strip(alpha);
    prof.a = a;
    prof.support_radius = x0;
    prof.breakpoints = {-x0, x0};

    std::vector<double> inside;
    for (double x : grid.nodes())
        if (std::abs(x) < x0 * (1.0 - 1e-12))
            inside.push_back(x);
    std::vector<double> s(inside.size());
    std::transform(inside.begin(), inside.end(), s.begin(), [](double x) { return std::abs(x); });
    std::vector<std::size_t> order(s.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return s[i] < s[j]; });
    std::vector<double> sorted(s.size());
    for (std::size_t k = 0; k < order.size(); ++k)
        sorted[k] = s[order[k]];
    const auto sampled = orbit.sample(sorted);
    std::vector<PhaseState> states(s.size());
    for (std::size_t k = 0; k < order.size(); ++k)
        states[order[k]] = sampled[k];

    auto push = [&](double x, double v, double dv) {
        prof.x.push_back(x);
        prof.v.push_back(v);
        prof.dv.push_back(dv);
        prof.d2v.push_back(-bistable(alpha, v));
    };
    push(-x0, 0.0, -hit.state[1]);
    for (std::size_t k = 0; k < inside.size(); ++k) {
        const double sign = inside[k] < 0.0 ? -1.0 : 1.0;
        push(inside[k], states[k][0], sign * states[k][1]);
    }
    push(x0, 0.0, hit.state[1]);
    return prof;
}

/// One period of the closed orbit through (a, 0), a in (0, alpha), starting at its minimum.
inline StationaryProfile build_periodic(double alpha, double a, std::size_t samples = 2001, OrbitTolerances tol = {})
{
    ModelParams::check_alpha(alpha);
    if (!(a > 0.0 && a < alpha))
        throw DomainError("periodic orbit requires 0 < a < alpha, got a = " + std::to_string(a));
    if (samples < 3)
        throw DomainError("periodic orbit needs at least 3 samples");
    const OuterOrbit orbit(alpha, {a, 0.0}, tol);
    const auto hit = orbit.run_until(StopCondition::trough());
    const double period = hit.s;

    StationaryProfile prof;
    prof.kind = ProfileKind::Periodic;
    prof.params = ModelParams::without_strip(alpha);
    prof.a = a;
    prof.period = period;
    std::vector<double> s(samples);
    for (std::size_t i = 0; i < samples; ++i)
        s[i] = period * static_cast<double>(i) / static_cast<double>(samples - 1);
    const auto states = orbit.sample(s);
    for (std::size_t i = 0; i < samples; ++i) {
        prof.x.push_back(s[i]);
        prof.v.push_back(states[i][0]);
        prof.dv.push_back(states[i][1]);
        prof.d2v.push_back(-bistable(alpha, states[i][0]));
    }
    prof.v.front() = prof.v.back() = a;
    prof.dv.front() = prof.dv.back() = 0.0;
    return prof;
}

/// Sup over interior samples of |v'' + f(x, v)|, v'' by the three-point
/// difference. Samples whose stencil straddles a breakpoint are skipped.
/// Bump and periodic profiles are checked against the bistable term alone.
inline double ode_residual(const StationaryProfile& prof, const ModelParams& p)
{
    const bool homogeneous = prof.kind == ProfileKind::CompactBump || prof.kind == ProfileKind::Periodic;
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < prof.size(); ++i) {
        const double xl = prof.x[i - 1], xc = prof.x[i], xr = prof.x[i + 1];
        const bool straddles = std::any_of(prof.breakpoints.begin(), prof.breakpoints.end(),
                                           [&](double b) { return xl < b && b < xr; });
        if (straddles)
            continue;
        const double hl = xc - xl, hr = xr - xc;
        const double d2 = 2.0 * ((prof.v[i + 1] - prof.v[i]) / hr - (prof.v[i] - prof.v[i - 1]) / hl) / (hl + hr);
        const double f = homogeneous ? bistable(p.alpha(), prof.v[i]) : reaction_value(p, xc, prof.v[i]);
        worst = std::max(worst, std::abs(d2 + f));
    }
    return worst;
}

enum class TailSide { Left, Right };

/// Least-squares slope of log(deviation) against x over samples whose
/// deviation from the limit lies in [dev_lo, dev_hi]. The limit is 1 on the
/// left and for the big solution on the right, 0 otherwise.
inline double tail_log_slope(const StationaryProfile& prof, TailSide side, double dev_lo = 1e-7, double dev_hi = 1e-6)
{
    const bool toward_one = side == TailSide::Left || prof.kind == ProfileKind::Big;
    const double L = prof.params.half_width();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < prof.size(); ++i) {
        const double x = prof.x[i];
        if ((side == TailSide::Left && x > -L) || (side == TailSide::Right && x < L))
            continue;
        const double dev = toward_one ? 1.0 - prof.v[i] : prof.v[i];
        if (!(dev >= dev_lo && dev <= dev_hi))
            continue;
        const double y = std::log(dev);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 3)
        throw NumericalError("tail_log_slope: fewer than 3 samples in the deviation band");
    const double dn = static_cast<double>(n);
    return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

struct OrderingReport {
    bool ordered = false;
    double min_gap_lower = std::numeric_limits<double>::infinity(); ///< min(Vg - Vs), or min(Vb - Vs) for a pair
    double min_gap_upper = std::numeric_limits<double>::infinity(); ///< min(Vb - Vg)
};

namespace detail {
inline void require_common_grid(const StationaryProfile& a, const StationaryProfile& b)
{
    if (a.x != b.x)
        throw DomainError("profiles are not sampled on a common grid");
}
} // namespace detail

/// Strict ordering Vs < Vg < Vb at every common sample.
inline OrderingReport check_ordering(const StationaryProfile& vs, const StationaryProfile& vg,
                                     const StationaryProfile& vb)
{
    detail::require_common_grid(vs, vg);
    detail::require_common_grid(vg, vb);
    OrderingReport rep;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        rep.min_gap_lower = std::min(rep.min_gap_lower, vg.v[i] - vs.v[i]);
        rep.min_gap_upper = std::min(rep.min_gap_upper, vb.v[i] - vg.v[i]);
    }
    rep.ordered = rep.min_gap_lower > 0.0 && rep.min_gap_upper > 0.0;
    return rep;
}

/// Strict ordering lower < upper at every common sample.
inline OrderingReport check_ordering(const StationaryProfile& lower, const StationaryProfile& upper)
{
    detail::require_common_grid(lower, upper);
    OrderingReport rep;
    for (std::size_t i = 0; i < lower.size(); ++i)
        rep.min_gap_lower = std::min(rep.min_gap_lower, upper.v[i] - lower.v[i]);
    rep.ordered = rep.min_gap_lower > 0.0;
    return rep;
}

} // namespace strip
