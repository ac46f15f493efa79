#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "strip/stationary.hpp"

using namespace strip;

namespace {

const double kAlpha = 0.25;

double lstar() { return critical_half_width(kAlpha); }

Grid1D grid_for(double L, double h = 0.01, double extent = 60.0) { return Grid1D::aligned(L, h, extent, extent); }

// Beyond x ~ -35 every profile rounds to exactly 1.0, so strict ordering is
// checked on a window where the left tails are still representable.
Grid1D ordering_grid(double L) { return Grid1D::aligned(L, 0.01, 25.0, 60.0); }

double energy(double alpha, double v, double w) { return 0.5 * w * w + outer_potential(alpha, v); }

// Plain bisection used only by the oracles below.
template <class Fn>
double oracle_root(Fn g, double lo, double hi)
{
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((g(lo) < 0) == (g(mid) < 0))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// (F(c) - F(c - s d)) / d for the cubic f, expanded exactly about c so the
// quotient keeps full precision as d -> 0 (s = +1 below c, -1 above).
double drop_quotient(double alpha, double c, double d, double s)
{
    const double f0 = c * (c - alpha) * (1 - c);
    const double f1 = -3 * c * c + 2 * (1 + alpha) * c - alpha;
    const double f2 = -6 * c + 2 * (1 + alpha);
    const double f3 = -6.0;
    return s * (f0 - s * f1 * d / 2 + f2 * d * d / 6 - s * f3 * d * d * d / 24);
}

// x0 = int_0^a dv / sqrt(2 (F(a) - F(v))) with v = a - t^2.
double bump_radius_oracle(double alpha, double a)
{
    using boost::math::quadrature::gauss_kronrod;
    auto g = [&](double t) { return 2.0 / std::sqrt(2.0 * drop_quotient(alpha, a, t * t, 1.0)); };
    return gauss_kronrod<double, 61>::integrate(g, 0.0, std::sqrt(a), 20, 1e-14);
}

// Period of the closed orbit through (a, 0): two half-integrals, each with
// the square-root endpoint removed by v = a + t^2 and v = b - t^2.
double period_oracle(double alpha, double a)
{
    using boost::math::quadrature::gauss_kronrod;
    const double E = outer_potential(alpha, a);
    const double b = oracle_root([&](double v) { return outer_potential(alpha, v) - E; }, alpha, theta(alpha));
    const double m = alpha;
    auto lower = [&](double t) { return 2.0 / std::sqrt(2.0 * drop_quotient(alpha, a, t * t, -1.0)); };
    auto upper = [&](double t) { return 2.0 / std::sqrt(2.0 * drop_quotient(alpha, b, t * t, 1.0)); };
    return 2.0 * (gauss_kronrod<double, 61>::integrate(lower, 0.0, std::sqrt(m - a), 20, 1e-14) +
                  gauss_kronrod<double, 61>::integrate(upper, 0.0, std::sqrt(b - m), 20, 1e-14));
}

} // namespace

TEST(SolveA, BigMatchesHeteroclinicCrossing)
{
    for (double L : {0.05, 0.5, 2.0, 8.0}) {
        const ModelParams p(kAlpha, L);
        const double a = solve_a_big(p);
        EXPECT_NEAR(a * std::cosh(L), v1_of_a(kAlpha, a), 1e-8) << L;
    }
    EXPECT_GT(solve_a_big(ModelParams(kAlpha, 1e-4)), 0.99);
    EXPECT_LT(solve_a_big(ModelParams(kAlpha, 10.0)), 1e-3);
}

TEST(SolveA, SmallRegime)
{
    const double Ls = lstar();
    EXPECT_EQ(solve_a_small(ModelParams(kAlpha, Ls)), theta(kAlpha));
    EXPECT_THROW(solve_a_small(ModelParams(kAlpha, 0.5 * Ls)), RegimeError);
    const double a = solve_a_small(ModelParams(kAlpha, 2.0 * Ls));
    EXPECT_GT(a, 0.0);
    EXPECT_LT(a, theta(kAlpha));
    EXPECT_NEAR(ell(kAlpha, a), 4.0 * Ls, 1e-9);
}

TEST(SolveA, GroundRegime)
{
    const double Ls = lstar();
    EXPECT_THROW(solve_a_ground(ModelParams(kAlpha, Ls)), RegimeError);
    EXPECT_THROW(solve_a_ground(ModelParams(kAlpha, 0.5 * Ls)), RegimeError);
    const ModelParams p(kAlpha, 2.0 * Ls);
    const double ag = solve_a_ground(p);
    const double as = solve_a_small(p);
    EXPECT_NEAR(ell(kAlpha, ag) + 2.0 * *spans(kAlpha, ag).small_span, 2.0 * p.half_width(), 1e-9);
    EXPECT_GT(ag, as);
    // closer to L* the spacing of doubles in a alone moves R + r by more than 1e-10
    EXPECT_GT(solve_a_ground(ModelParams(kAlpha, Ls * (1 + 1e-4))), theta(kAlpha) - 1e-6);
}

TEST(BuildProfile, BigShape)
{
    for (double L : {0.5 * lstar(), lstar(), 2.0 * lstar()}) {
        const ModelParams p(kAlpha, L);
        const auto g = grid_for(L);
        const auto b = build_profile(ProfileKind::Big, p, g);
        EXPECT_NEAR(b.value_at(0.0), b.a, 1e-12);
        EXPECT_LT(b.matching_dv, 1e-8);
        EXPECT_LT(b.matching_dw, 1e-8);
        for (double x : {0.1, 0.7, 3.0, 15.0})
            EXPECT_NEAR(b.value_at(x), b.value_at(-x), 1e-10) << x;
        for (std::size_t i = 0; i < b.size(); ++i) {
            EXPECT_GT(b.v[i], 0.0);
            EXPECT_LE(b.v[i], 1.0);
            // deviations below rounding of 1.0 are not representable
            if (std::abs(b.x[i]) < 20.0) {
                EXPECT_LT(b.v[i], 1.0);
            }
        }
    }
}

TEST(BuildProfile, SmallStrictlyDecreasing)
{
    for (double L : {lstar(), 2.0 * lstar()}) {
        const ModelParams p(kAlpha, L);
        const auto s = build_profile(ProfileKind::Small, p, grid_for(L));
        for (std::size_t i = 1; i < s.size(); ++i) {
            ASSERT_LE(s.v[i], s.v[i - 1]) << "L=" << L << " x=" << s.x[i];
            if (1.0 - s.v[i - 1] > 1e-12) {
                ASSERT_LT(s.v[i], s.v[i - 1]) << "L=" << L << " x=" << s.x[i];
            }
        }
        EXPECT_GT(s.v.back(), 0.0);
        EXPECT_LT(s.matching_dw, 1e-8);
        EXPECT_LT(s.matching_dv, 1e-8);
    }
}

TEST(BuildProfile, SmallMissingBelowCritical)
{
    const ModelParams p(kAlpha, 0.5 * lstar());
    EXPECT_THROW(build_profile(ProfileKind::Small, p, grid_for(p.half_width())), RegimeError);
    EXPECT_THROW(build_profile(ProfileKind::Ground, p, grid_for(p.half_width())), RegimeError);
}

TEST(BuildProfile, GroundExtrema)
{
    const ModelParams p(kAlpha, 2.0 * lstar());
    const double L = p.half_width();
    const auto g = build_profile(ProfileKind::Ground, p, grid_for(L));
    ASSERT_TRUE(g.x_min_point && g.x_max_point);
    EXPECT_NEAR(*g.x_min_point, 0.5 * ell(kAlpha, g.a), 1e-12);
    EXPECT_GT(*g.x_min_point, -L);
    EXPECT_LT(*g.x_min_point, L);
    EXPECT_GT(*g.x_max_point, L);
    EXPECT_NEAR(g.value_at(*g.x_max_point), theta(kAlpha), 1e-6);
    EXPECT_NEAR(g.value_at(*g.x_min_point), g.a, 1e-10);
    EXPECT_LT(g.matching_dv, 1e-8);
    EXPECT_LT(g.matching_dw, 1e-8);
}

TEST(BuildProfile, ResidualSecondOrder)
{
    const ModelParams p(kAlpha, 2.0 * lstar());
    for (auto kind : {ProfileKind::Big, ProfileKind::Small, ProfileKind::Ground}) {
        const double r1 = ode_residual(build_profile(kind, p, grid_for(p.half_width(), 0.02, 40)), p);
        const double r2 = ode_residual(build_profile(kind, p, grid_for(p.half_width(), 0.01, 40)), p);
        EXPECT_LT(r2, 1e-3) << to_string(kind);
        const double order = std::log2(r1 / r2);
        EXPECT_GT(order, 1.8) << to_string(kind);
        EXPECT_LT(order, 2.2) << to_string(kind);
    }
}

TEST(BuildProfile, ResidualZeroOnFlatData)
{
    StationaryProfile flat;
    flat.params = ModelParams(kAlpha, 1.0);
    for (int i = 0; i < 50; ++i) {
        flat.x.push_back(2.0 + 0.1 * i);
        flat.v.push_back(1.0);
    }
    EXPECT_EQ(ode_residual(flat, flat.params), 0.0);
}

TEST(BuildProfile, TailRates)
{
    const ModelParams p(kAlpha, 2.0 * lstar());
    const auto g = grid_for(p.half_width());
    const double left = -std::sqrt(1.0 - kAlpha), right = -std::sqrt(kAlpha);
    const auto b = build_profile(ProfileKind::Big, p, g);
    EXPECT_NEAR(tail_log_slope(b, TailSide::Left) / -left, 1.0, 0.01);
    EXPECT_NEAR(tail_log_slope(b, TailSide::Right) / left, 1.0, 0.01);
    for (auto kind : {ProfileKind::Small, ProfileKind::Ground}) {
        const auto prof = build_profile(kind, p, g);
        EXPECT_NEAR(tail_log_slope(prof, TailSide::Left) / -left, 1.0, 0.01);
        EXPECT_NEAR(tail_log_slope(prof, TailSide::Right) / right, 1.0, 0.01);
    }
}

TEST(BuildProfile, EnergyConservedOnOuterPieces)
{
    const ModelParams p(kAlpha, 2.0 * lstar());
    const double L = p.half_width();
    const auto g = grid_for(L);
    const double e1 = outer_potential(kAlpha, 1.0);
    for (auto kind : {ProfileKind::Big, ProfileKind::Small, ProfileKind::Ground}) {
        const auto prof = build_profile(kind, p, g);
        const double e_right = kind == ProfileKind::Big ? e1 : 0.0;
        for (std::size_t i = 0; i < prof.size(); ++i) {
            const double e = energy(kAlpha, prof.v[i], prof.dv[i]);
            if (prof.x[i] <= -L) {
                EXPECT_NEAR(e, e1, 1e-9) << to_string(kind) << " " << prof.x[i];
            } else if (prof.x[i] >= L) {
                EXPECT_NEAR(e, e_right, 1e-9) << to_string(kind) << " " << prof.x[i];
            }
        }
    }
}

TEST(BuildProfile, RebuildIsBitStable)
{
    const ModelParams p(kAlpha, 2.0 * lstar());
    const auto g = grid_for(p.half_width(), 0.05, 30);
    for (auto kind : {ProfileKind::Big, ProfileKind::Small, ProfileKind::Ground}) {
        const auto a = build_profile(kind, p, g);
        const auto b = build_profile(kind, p, g);
        EXPECT_EQ(a.a, b.a);
        EXPECT_EQ(a.v, b.v);
    }
}

TEST(Ordering, ThreeProfilesAtTwiceCritical)
{
    const ModelParams p(kAlpha, 2.0 * lstar());
    const auto g = ordering_grid(p.half_width());
    const auto vs = build_profile(ProfileKind::Small, p, g);
    const auto vg = build_profile(ProfileKind::Ground, p, g);
    const auto vb = build_profile(ProfileKind::Big, p, g);
    const auto rep = check_ordering(vs, vg, vb);
    EXPECT_TRUE(rep.ordered);
    EXPECT_GT(rep.min_gap_lower, 0.0);
    EXPECT_GT(rep.min_gap_upper, 0.0);
    EXPECT_FALSE(check_ordering(vs, vs).ordered);
    EXPECT_THROW(check_ordering(vs, build_profile(ProfileKind::Big, p, grid_for(p.half_width(), 0.02))),
                 DomainError);
}

TEST(Ordering, SmallBelowBigAtCritical)
{
    const ModelParams p(kAlpha, lstar());
    const auto g = ordering_grid(p.half_width());
    EXPECT_TRUE(check_ordering(build_profile(ProfileKind::Small, p, g), build_profile(ProfileKind::Big, p, g)).ordered);
}

TEST(SmallFamily, LowerWellAtCriticalWidth)
{
    const ModelParams p(kAlpha, lstar());
    const auto g = ordering_grid(p.half_width());
    const auto wells = small_wells(kAlpha, p.half_width());
    ASSERT_EQ(wells.size(), 2u);
    const auto lower = build_profile(ProfileKind::Small, p, g, {}, wells[0]);
    const auto upper = build_profile(ProfileKind::Small, p, g);
    EXPECT_EQ(upper.a, theta(kAlpha));
    EXPECT_LT(lower.matching_dw, 1e-8);
    EXPECT_LT(ode_residual(lower, p), 1e-3);
    EXPECT_TRUE(check_ordering(lower, upper).ordered);
    EXPECT_THROW(build_profile(ProfileKind::Small, p, g, {}, 0.2), DomainError);
}

TEST(CompactBump, EndpointsAndSymmetry)
{
    const double a = 0.6;
    const auto g = Grid1D::uniform_spacing(-30, 30, 0.01);
    const auto bump = build_compact_bump(kAlpha, a, g);
    ASSERT_TRUE(bump.support_radius);
    const double x0 = *bump.support_radius;
    EXPECT_EQ(bump.x.front(), -x0);
    EXPECT_EQ(bump.x.back(), x0);
    EXPECT_EQ(bump.v.front(), 0.0);
    EXPECT_EQ(bump.v.back(), 0.0);
    const double slope = -std::sqrt(2.0 * outer_potential(kAlpha, a));
    EXPECT_NEAR(bump.dv.back(), slope, 1e-9);
    EXPECT_NEAR(bump.value_at(0.0), a, 1e-9);
    EXPECT_NEAR(x0, bump_radius_oracle(kAlpha, a), 1e-8);
    for (double x : {0.05, 0.5, 1.0, 0.9 * x0})
        EXPECT_NEAR(bump.value_at(x), bump.value_at(-x), 1e-10);
    EXPECT_LT(ode_residual(bump, ModelParams::without_strip(kAlpha)), 1e-3);
}

TEST(CompactBump, RadiusGrowsTowardTheta)
{
    const auto g = Grid1D::uniform_spacing(-60, 60, 0.05);
    const double th = theta(kAlpha);
    double prev = 0.0;
    for (double gap : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
        const double x0 = *build_compact_bump(kAlpha, th + gap, g).support_radius;
        EXPECT_GT(x0, prev);
        EXPECT_NEAR(x0, bump_radius_oracle(kAlpha, th + gap), 1e-6 * x0);
        prev = x0;
    }
    EXPECT_THROW(build_compact_bump(kAlpha, th, g), DomainError);
}

TEST(Periodic, Bounds)
{
    for (double a : {0.01, 0.1, 0.2}) {
        const auto per = build_periodic(kAlpha, a);
        const double lo = *std::min_element(per.v.begin(), per.v.end());
        const double hi = *std::max_element(per.v.begin(), per.v.end());
        EXPECT_NEAR(lo, a, 1e-9);
        EXPECT_LT(hi, theta(kAlpha));
        EXPECT_GT(lo, 0.0);
        const double e0 = energy(kAlpha, a, 0.0);
        for (std::size_t i = 0; i < per.size(); ++i)
            EXPECT_NEAR(energy(kAlpha, per.v[i], per.dv[i]), e0, 1e-9);
        const double T = period_oracle(kAlpha, a);
        EXPECT_NEAR(*per.period / T, 1.0, 1e-8) << a;
        const auto tight = build_periodic(kAlpha, a, 3, OrbitTolerances{1e-15, 1e-13, 1e-4});
        EXPECT_NEAR(*tight.period, T, 2e-10) << a;
    }
}

TEST(Periodic, OracleReference)
{
    // 40-digit quadrature of the half-period integral
    EXPECT_NEAR(period_oracle(kAlpha, 0.01), 24.546168495202678, 1e-10);
}

TEST(Periodic, SmallAmplitudeLimit)
{
    const double a = kAlpha - 1e-4;
    const auto per = build_periodic(kAlpha, a);
    const double linear = 2.0 * M_PI / std::sqrt(kAlpha * (1.0 - kAlpha));
    EXPECT_NEAR(*per.period, period_oracle(kAlpha, a), 1e-6);
    EXPECT_NEAR(*per.period / linear, 1.0, 1e-3);
    EXPECT_THROW(build_periodic(kAlpha, kAlpha), DomainError);
}
