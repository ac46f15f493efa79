#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "strip/errors.hpp"
#include "strip/reaction.hpp"
#include "strip/roots.hpp"

namespace strip {

inline constexpr double kRootResidualTol = 1e-12;

/// Intersections of the strip orbit w^2 = v^2 - a^2 (well depth a) with the
/// heteroclinic into (1,0) and with the homoclinic loop at (0,0), and the
/// x-spans they induce on the cosh middle piece.
struct SpanTable {
    double a = 0.0;
    double v1 = 0.0;             ///< crossing with the heteroclinic, in (a, 1)
    double big_span = 0.0;       ///< R(a) = arccosh(v1 / a)
    std::optional<double> v2;    ///< crossing with the homoclinic, a <= theta only
    std::optional<double> small_span; ///< r(a) = arccosh(v2 / a)
    std::optional<double> ell;   ///< R - r
};

namespace detail {

inline void check_well(double a)
{
    if (!(a > 0.0 && a < 1.0))
        throw DomainError("well ordinate a must satisfy 0 < a < 1, got " + std::to_string(a));
}

/// arccosh(v / a) written to avoid cancellation when v is close to a.
inline double span_from(double a, double v)
{
    const double w = std::sqrt(std::max(0.0, (v - a) * (v + a)));
    return std::log((v + w) / a);
}

} // namespace detail

/// v^2 - a^2 - 2 * int_v^1 f_l; zero at the heteroclinic crossing.
inline double heteroclinic_mismatch(double alpha, double a, double v)
{
    return (v - a) * (v + a) - 2.0 * potential_gap_to_one(alpha, 1.0 - v);
}

/// v^2 - a^2 + 2 * int_0^v f_l; zero at the homoclinic crossing.
inline double homoclinic_mismatch(double alpha, double a, double v)
{
    return (v - a) * (v + a) + 2.0 * outer_potential(alpha, v);
}

inline double v1_of_a(double alpha, double a)
{
    ModelParams::check_alpha(alpha);
    detail::check_well(a);
    return bisect([&](double v) { return heteroclinic_mismatch(alpha, a, v); }, a, 1.0,
                  kRootResidualTol, "v1_of_a");
}

inline double v2_of_a(double alpha, double a)
{
    const double th = theta(alpha);
    detail::check_well(a);
    if (a > th)
        throw DomainError("v2 requires a <= theta(alpha) = " + std::to_string(th) + ", got a = " +
                          std::to_string(a));
    if (a == th)
        return th;
    return bisect([&](double v) { return homoclinic_mismatch(alpha, a, v); }, a, th, kRootResidualTol,
                  "v2_of_a");
}

inline SpanTable spans(double alpha, double a)
{
    SpanTable t;
    t.a = a;
    t.v1 = v1_of_a(alpha, a);
    t.big_span = detail::span_from(a, t.v1);
    if (a <= theta(alpha)) {
        t.v2 = v2_of_a(alpha, a);
        t.small_span = detail::span_from(a, *t.v2);
        t.ell = t.big_span - *t.small_span;
    }
    return t;
}

inline double big_span(double alpha, double a) { return spans(alpha, a).big_span; }

/// R(a) + r(a): the strip length of the transition profile's middle piece.
inline double ground_span(double alpha, double a)
{
    const SpanTable t = spans(alpha, a);
    if (!t.small_span)
        throw DomainError("ground span requires a <= theta(alpha)");
    return t.big_span + *t.small_span;
}

inline double ell(double alpha, double a)
{
    const SpanTable t = spans(alpha, a);
    if (!t.ell)
        throw DomainError("ell requires a <= theta(alpha)");
    return *t.ell;
}

/// L* = ell(theta) / 2 = R(theta) / 2.
inline double critical_half_width(double alpha)
{
    const double th = theta(alpha);
    return 0.5 * big_span(alpha, th);
}

struct EllMinimum {
    double a;
    double ell;
};

/// Interior minimum of ell on (0, theta].
///
/// r(a) vanishes like sqrt(theta - a) at the tangency, so ell = R - r rises
/// into its endpoint value 2 L* and the infimum sits strictly inside the
/// interval; ell decreases before the minimiser and increases after it.
inline EllMinimum ell_minimum(double alpha)
{
    const double th = theta(alpha);
    auto f = [&](double a) { return ell(alpha, a); };
    const auto [a, value] = boost::math::tools::brent_find_minima(f, 1e-3 * th, th, 50);
    if (!(value < ell(alpha, th)))
        return {th, ell(alpha, th)};
    return {a, value};
}

/// Every a in (0, theta] with ell(a) = 2L, in increasing order.
///
/// Empty below the minimum of ell, two roots between the minimum and L*
/// (the second being theta itself at L = L*), one root beyond L*.
inline std::vector<double> small_wells(double alpha, double half_width)
{
    const double th = theta(alpha);
    const double target = 2.0 * half_width;
    const EllMinimum m = ell_minimum(alpha);
    std::vector<double> roots;
    if (target < m.ell)
        return roots;
    auto g = [&](double a) { return ell(alpha, a) - target; };
    if (target == m.ell)
        return {m.a};
    double lo = 1e-3 * th;
    while (g(lo) <= 0.0) {
        lo *= 1e-3;
        if (lo < 1e-290)
            throw NumericalError("small_wells: strip too wide to bracket ell(a) = 2L");
    }
    roots.push_back(bisect(g, lo, m.a, 1e-10, "small_wells (decreasing branch)"));
    const double end = g(th);
    if (end == 0.0 || std::abs(end) <= 1e-12 * target)
        roots.push_back(th);
    else if (end > 0.0) {
        // same square-root regularisation as for the transition well
        auto gu = [&](double u) { return g(th - u * u); };
        const double u = bisect(gu, 0.0, std::sqrt(th - m.a), 1e-10, "small_wells (increasing branch)");
        roots.push_back(th - u * u);
    }
    return roots;
}

/// n points log-spaced on [a_min, theta(alpha)]; the last point is theta exactly.
inline std::vector<double> log_a_grid(double alpha, std::size_t n, double a_min = 1e-4)
{
    const double th = theta(alpha);
    if (n < 2)
        throw DomainError("a-grid needs at least 2 points");
    if (!(a_min > 0.0 && a_min < th))
        throw DomainError("a-grid lower bound must lie in (0, theta)");
    std::vector<double> grid(n);
    const double lmin = std::log(a_min), lmax = std::log(th);
    for (std::size_t i = 0; i < n; ++i)
        grid[i] = std::exp(lmin + (lmax - lmin) * static_cast<double>(i) / static_cast<double>(n - 1));
    grid.front() = a_min;
    grid.back() = th;
    return grid;
}

/// Rows (a, v1, v2, R, r, ell) along an increasing grid inside (0, theta].
inline std::vector<SpanTable> span_curve(double alpha, std::span<const double> a_grid)
{
    const double th = theta(alpha);
    std::vector<SpanTable> rows;
    rows.reserve(a_grid.size());
    double prev = 0.0;
    for (double a : a_grid) {
        if (!(a > prev) || a > th)
            throw DomainError("span_curve grid must be strictly increasing inside (0, theta]");
        rows.push_back(spans(alpha, a));
        prev = a;
    }
    return rows;
}

} // namespace strip
