#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "strip/errors.hpp"

namespace strip {

/// Bistable parameter alpha and half-width L of the hostile strip (-L, L).
class ModelParams {
public:
    ModelParams(double alpha, double half_width) : alpha_(alpha), half_width_(half_width)
    {
        check_alpha(alpha);
        if (!(half_width > 0.0) || !std::isfinite(half_width))
            throw DomainError("half_width must satisfy L > 0, got " + std::to_string(half_width));
    }

    /// Homogeneous bistable medium (no strip). Only used to probe the outer reaction alone.
    static ModelParams without_strip(double alpha)
    {
        ModelParams p(alpha, 1.0);
        p.half_width_ = 0.0;
        return p;
    }

    double alpha() const noexcept { return alpha_; }
    double half_width() const noexcept { return half_width_; }

    /// The strip is open: |x| = L belongs to the bistable region.
    bool in_strip(double x) const noexcept { return std::abs(x) < half_width_; }

    static void check_alpha(double alpha)
    {
        if (!(alpha > 0.0 && alpha < 0.5))
            throw DomainError("alpha must satisfy 0 < alpha < 1/2, got " + std::to_string(alpha));
    }

private:
    double alpha_;
    double half_width_;
};

/// Outer (bistable) reaction u(u - alpha)(1 - u).
inline double bistable(double alpha, double u) noexcept { return u * (u - alpha) * (1.0 - u); }

inline double bistable_derivative(double alpha, double u) noexcept
{
    return -3.0 * u * u + 2.0 * (1.0 + alpha) * u - alpha;
}

inline double reaction_value(const ModelParams& p, double x, double u) noexcept
{
    return p.in_strip(x) ? -u : bistable(p.alpha(), u);
}

/// Integral of the bistable term from 0 to u.
inline double outer_potential(double alpha, double u) noexcept
{
    const double u2 = u * u;
    return -0.25 * u2 * u2 + (1.0 + alpha) * u2 * u / 3.0 - 0.5 * alpha * u2;
}

inline double outer_potential(const ModelParams& p, double u) noexcept
{
    return outer_potential(p.alpha(), u);
}

/// Integral of the bistable term from 1 - d to 1, expanded in d so it stays
/// accurate when d is tiny.
inline double potential_gap_to_one(double alpha, double d) noexcept
{
    const double d2 = d * d;
    return 0.5 * (1.0 - alpha) * d2 - (2.0 - alpha) * d2 * d / 3.0 + 0.25 * d2 * d2;
}

/// Closed-form balance ordinate, unchecked. Exactly 1 at alpha = 1/2.
inline double theta_closed_form(double alpha) noexcept
{
    const double b = 4.0 * (alpha + 1.0);
    const double disc = std::max(0.0, b * b - 72.0 * alpha);
    return (b - std::sqrt(disc)) / 6.0;
}

/// Balance ordinate: the zero of the outer potential in (alpha, 1).
inline double theta(double alpha)
{
    ModelParams::check_alpha(alpha);
    return theta_closed_form(alpha);
}

/// Global Lipschitz bound in u of f(x, u) for u in [0, upper].
inline double reaction_lipschitz(double alpha, double upper) noexcept
{
    // |f'| is maximised at an endpoint or at the vertex of the quadratic f'.
    const double vertex = (1.0 + alpha) / 3.0;
    double lip = 1.0; // strip branch -u
    for (double u : {0.0, upper, std::min(vertex, upper)})
        lip = std::max(lip, std::abs(bistable_derivative(alpha, u)));
    return lip;
}

} // namespace strip
