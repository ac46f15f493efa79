// Reference acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "strip/barrier.hpp"
#include "strip/dynamics.hpp"
#include "strip/io.hpp"

using namespace strip;

namespace {

const double kAlpha = 0.25;

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok)
            pass = false;
        detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [violated]");
    }
};

std::string g(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double lstar() { return critical_half_width(kAlpha); }

// smaller root of 3 t^2 - 4 (1 + a) t + 6 a in the cancellation-free form
double theta_oracle(double a)
{
    const double b = 4.0 * (1.0 + a);
    const double disc = b * b - 72.0 * a;
    return 12.0 * a / (b + std::sqrt(disc));
}

void criterion1(Verdict& v)
{
    const double near_half = theta(0.5 - 1e-12);
    v.require(near_half > 1.0 - 1e-5 && near_half <= 1.0, "theta(0.5 - 1e-12) = " + io::num(near_half));
    const double t = theta(0.25);
    const double exact = (5.0 - std::sqrt(7.0)) / 6.0;
    v.require(std::abs(t - exact) < 1e-12 && std::abs(t - theta_oracle(0.25)) < 1e-12,
              "theta(0.25) - (5 - sqrt 7)/6 = " + g(t - exact) + ", vs quadratic root " +
                  g(t - theta_oracle(0.25)));
}

void criterion2(Verdict& v)
{
    for (double alpha : {0.1, 0.25, 0.4}) {
        const auto rows = span_curve(alpha, log_a_grid(alpha, 200));
        std::size_t bad = 0;
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (!(*rows[i].ell < *rows[i - 1].ell))
                ++bad;
        const double terminal = *rows.back().ell;
        const double target = 2.0 * critical_half_width(alpha);
        v.require(bad == 0, "alpha " + g(alpha) + ": " + std::to_string(bad) + " monotonicity violations in " +
                                std::to_string(rows.size()) + " rows");
        v.require(rows.back().a == theta(alpha) && std::abs(terminal - target) <= 1e-14 * target,
                  "alpha " + g(alpha) + ": terminal ell " + io::num(terminal) + " vs 2L* " + io::num(target));
    }
}

void criterion3(Verdict& v)
{
    double worst = 0.0, worst_alpha = 0.0;
    for (int i = 0; i < 10; ++i) {
        const double alpha = 0.05 + 0.4 * i / 9.0;
        const auto rows = span_curve(alpha, log_a_grid(alpha, 5000));
        double inf = INFINITY;
        for (const auto& r : rows)
            inf = std::min(inf, *r.ell);
        const double Ls = critical_half_width(alpha);
        const double rel = std::abs(0.5 * inf - Ls) / Ls;
        if (rel > worst) {
            worst = rel;
            worst_alpha = alpha;
        }
    }
    v.require(worst < 1e-6, "worst relative gap between L* and the grid infimum of ell/2 is " + g(worst) +
                                " at alpha " + g(worst_alpha));
}

void criterion4(Verdict& v)
{
    const double Ls = lstar();
    const double sl = std::sqrt(1.0 - kAlpha), sr = std::sqrt(kAlpha);
    std::size_t checked = 0;
    for (double factor : {0.5, 1.0, 2.0}) {
        const ModelParams p(kAlpha, factor * Ls);
        const double L = p.half_width();
        auto grid = [&](double h) { return Grid1D::aligned(L, h, 60.0, 60.0); };
        struct Case {
            ProfileKind kind;
            std::optional<double> well;
            std::string name;
        };
        std::vector<Case> cases{{ProfileKind::Big, std::nullopt, "big"}};
        const auto wells = small_wells(kAlpha, L);
        if (factor >= 1.0) {
            cases.push_back({ProfileKind::Small, std::nullopt, "small"});
            if (wells.size() > 1)
                cases.push_back({ProfileKind::Small, wells.front(), "small(lower well)"});
        }
        if (factor > 1.0)
            cases.push_back({ProfileKind::Ground, std::nullopt, "ground"});
        for (const auto& c : cases) {
            const std::string tag = g(factor) + "L* " + c.name;
            const auto fine = build_profile(c.kind, p, grid(0.01), {}, c.well);
            const auto coarse = build_profile(c.kind, p, grid(0.02), {}, c.well);
            v.require(fine.matching_dv < 1e-8 && fine.matching_dw < 1e-8,
                      tag + " matching " + g(fine.matching_dv) + "/" + g(fine.matching_dw));
            const double r1 = ode_residual(coarse, p), r2 = ode_residual(fine, p);
            const double order = std::log2(r1 / r2);
            v.require(r2 < 1e-3 && std::abs(order - 2.0) < 0.2,
                      tag + " residual " + g(r2) + " order " + g(order));
            const double left = tail_log_slope(fine, TailSide::Left);
            const double right = tail_log_slope(fine, TailSide::Right);
            const double want_right = c.kind == ProfileKind::Big ? -sl : -sr;
            v.require(std::abs(left / sl - 1.0) < 0.01 && std::abs(right / want_right - 1.0) < 0.01,
                      tag + " tail slopes " + g(left) + ", " + g(right));
            ++checked;
        }
        // kinds that must not exist in this regime
        if (factor < 1.0) {
            bool small_missing = false;
            try {
                build_profile(ProfileKind::Small, p, grid(0.02));
            } catch (const RegimeError&) {
                small_missing = true;
            }
            v.require(small_missing, "0.5L* small solution rejected");
        }
    }
    v.detail << "; " << checked << " profiles checked";
}

void criterion5(Verdict& v)
{
    const ModelParams p(kAlpha, 2.0 * lstar());
    // left tails round to exactly 1 in double precision beyond x ~ -35
    const auto grid = Grid1D::aligned(p.half_width(), 0.01, 25.0, 60.0);
    const auto vs = build_profile(ProfileKind::Small, p, grid);
    const auto vg = build_profile(ProfileKind::Ground, p, grid);
    const auto vb = build_profile(ProfileKind::Big, p, grid);
    const auto rep = check_ordering(vs, vg, vb);
    v.require(rep.ordered, "min(Vg - Vs) = " + g(rep.min_gap_lower) + ", min(Vb - Vg) = " + g(rep.min_gap_upper) +
                               " on " + std::to_string(grid.size()) + " nodes of [" + g(grid.x_min()) + ", " +
                               g(grid.x_max()) + "]");
}

double heat_error()
{
    const auto grid = Grid1D::uniform_spacing(-30.0, 30.0, 0.02);
    Field f{grid, std::vector<double>(grid.size()), 0.0};
    auto kernel = [](double x, double t) { return std::exp(-x * x / (4.0 * (1.0 + t))) / std::sqrt(1.0 + t); };
    for (std::size_t i = 0; i < grid.size(); ++i)
        f.u[i] = kernel(grid.node(i), 0.0);
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 1.0;
    cfg.reaction = false;
    cfg.steady_tol = 1e-300;
    evolve(f, ModelParams(kAlpha, 1.0), cfg);
    double err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        err = std::max(err, std::abs(f.u[i] - kernel(grid.node(i), f.t)));
    return err;
}

void criterion6(Verdict& v)
{
    const double err = heat_error();
    v.require(err < 1e-4, "heat kernel sup error " + g(err));

    const ModelParams p(kAlpha, 2.0 * lstar());
    const double C = 2.0;
    for (double h : {0.1, 0.05}) {
        const auto grid = Grid1D::aligned(p.half_width(), h, 40.0, 40.0);
        const auto vb = build_profile(ProfileKind::Big, p, grid);
        Field f = field_from_profile(vb, grid);
        SimConfig cfg;
        cfg.t_max = 10.0;
        cfg.steady_tol = 1e-300;
        double worst = 0.0;
        EvolveHooks hooks;
        hooks.unit_time = [&](const Field& fl) {
            worst = std::max(worst, sup_distance(fl, vb, {-39.0, 39.0}));
            return false;
        };
        evolve(f, p, cfg, hooks);
        v.require(worst < C * h * h, "Vb drift at h " + g(h) + " is " + g(worst) + " (C h^2 = " + g(C * h * h) + ")");
    }

    const DynamicsConfig dc;
    const auto grid = dynamics_grid(p, dc, -3.0, -2.5);
    Field lo = make_initial(InitialData::step(-3.0), grid);
    Field hi = make_initial(InitialData::step(-2.5), grid);
    const ImexStepper st(p, grid, dc.sim);
    double worst = INFINITY;
    while (lo.t < dc.sim.t_max - 1e-9) {
        st.step(lo);
        st.step(hi);
        for (std::size_t i = 0; i < grid.size(); ++i)
            worst = std::min(worst, hi.u[i] - lo.u[i]);
    }
    v.require(worst >= 0.0, "ordered pair sigma = -3 < -2.5 up to t = " + g(lo.t) + ": min(u_hi - u_lo) = " + g(worst));
}

void criterion7(Verdict& v)
{
    const ModelParams p(kAlpha, 0.5 * lstar());
    for (int refine = 0; refine < 2; ++refine) {
        DynamicsConfig cfg;
        cfg.certificate = false; // run to steadiness for the distance check
        cfg.h /= (1 << refine);
        cfg.sim.dt /= (1 << refine);
        const auto grid = dynamics_grid(p, cfg, 0.0, 0.0);
        const auto set = ProfileSet::build(p, grid, cfg.bump_gap);
        const auto o = classify(p, InitialData::step(0.0), cfg, set);
        const Window w = set.window(20.0);
        const std::string tag = "h " + g(cfg.h) + " dt " + g(cfg.sim.dt);
        v.require(o.label == Label::Spreading, tag + ": " + std::string(to_string(o.label)) + " at t " + g(o.final_t));
        v.require(w.lo == -20.0 && w.hi == 20.0 && o.dist_vb && *o.dist_vb < 1e-2,
                  tag + ": dist to Vb on [-20, 20] " + g(o.dist_vb.value_or(NAN)));
    }
}

struct Shared {
    std::optional<ThresholdResult> wide_1e4;
};

ThresholdResult thresholds(double factor, double sigma_tol)
{
    DynamicsConfig cfg;
    cfg.sigma_tol = sigma_tol;
    return find_thresholds(ModelParams(kAlpha, factor * lstar()), InitialData::step(0.0), cfg, {-60.0, 60.0});
}

std::string bracket_text(const std::optional<Bracket>& b)
{
    return b ? "[" + io::num(b->lo) + ", " + io::num(b->hi) + "]" : "none";
}

void criterion8(Verdict& v, Shared& shared)
{
    {
        const auto r = thresholds(1.0, 1e-4);
        if (!r.sigma_lower || !r.sigma_upper) {
            v.require(false, "L*: no brackets");
        } else {
            const double gap = std::abs(r.sigma_lower->mid() - r.sigma_upper->mid());
            v.require(r.sigma_lower->width() < 1e-4 && r.sigma_upper->width() < 1e-4 && gap < 1e-3,
                      "L*: sigma_* " + bracket_text(r.sigma_lower) + ", sigma^* " + bracket_text(r.sigma_upper) +
                          ", midpoint gap " + g(gap));
        }
    }
    const auto r = thresholds(2.0, 1e-4);
    shared.wide_1e4 = r;
    if (!r.sigma_lower || !r.sigma_upper) {
        v.require(false, "2L*: no brackets");
        return;
    }
    const Bracket lower = *r.sigma_lower, upper = *r.sigma_upper;
    v.require(lower.hi <= upper.hi && lower.width() < 1e-4 && upper.width() < 1e-4,
              "2L*: sigma_* " + bracket_text(lower) + ", sigma^* " + bracket_text(upper));
    std::size_t below = 0, above = 0, inside = 0, bad = 0;
    for (const auto& [s, o] : r.log) {
        if (s <= lower.lo) {
            ++below;
            bad += o.label == Label::Residue ? 0 : 1;
        } else if (s >= upper.hi) {
            ++above;
            bad += o.label == Label::Spreading ? 0 : 1;
        } else if (s > lower.hi && s < upper.lo) {
            ++inside;
            bad += (o.label == Label::Residue || o.label == Label::Spreading) ? 1 : 0;
        }
    }
    v.require(bad == 0, "2L*: " + std::to_string(below) + " residue below, " + std::to_string(above) +
                            " spreading above, " + std::to_string(inside) + " inside, " + std::to_string(bad) +
                            " misplaced labels");
}

void criterion9(Verdict& v, Shared& shared)
{
    const ModelParams p(kAlpha, 2.0 * lstar());
    const DynamicsConfig cfg;
    const auto set = ProfileSet::build(p, dynamics_grid(p, cfg, -60.0, 60.0), cfg.bump_gap);
    std::vector<double> mins;
    std::string trail;
    for (double tol : {1e-4, 1e-5, 1e-6}) {
        const ThresholdResult r = tol == 1e-4 && shared.wide_1e4 ? *shared.wide_1e4 : thresholds(2.0, tol);
        if (!r.sigma_upper) {
            v.require(false, "no sigma^* bracket at tolerance " + g(tol));
            return;
        }
        const double mid = r.sigma_upper->mid();
        const auto sh = ground_shadowing(p, InitialData::step(mid), cfg, set);
        mins.push_back(sh.min_distance);
        trail += (trail.empty() ? "" : ", ") + g(tol) + ": sigma " + io::num(mid) + " min " + g(sh.min_distance) +
                 " at t " + g(sh.time_of_min);
    }
    v.require(mins.back() < 5e-2, "min distance to Vg at the 1e-6 midpoint " + g(mins.back()));
    bool decreasing = true;
    for (std::size_t i = 1; i < mins.size(); ++i)
        decreasing = decreasing && mins[i] < mins[i - 1];
    v.require(decreasing, "decreasing under refinement (" + trail + ")");
}

void criterion10(Verdict& v)
{
    const ModelParams p(kAlpha, 2.0 * lstar());
    const DynamicsConfig cfg;
    const double sigma = -20.0;
    const auto grid = dynamics_grid(p, cfg, sigma, sigma);
    const Barrier b = build_barrier(p, grid);
    const auto vs = build_profile(ProfileKind::Small, p, grid);
    double sep = INFINITY;
    for (std::size_t i = 0; i < grid.size(); ++i)
        sep = std::min(sep, b.profile.v[i] - vs.v[i]);
    v.require(b.epsilon > 0.0 && sep >= 3.0 * b.epsilon * (1.0 - 1e-12),
              "eps " + g(b.epsilon) + ", min(Vbar - Vs) " + g(sep));

    Field f = make_initial(InitialData::step(sigma), grid);
    double start_gap = INFINITY;
    for (std::size_t i = 0; i < grid.size(); ++i)
        start_gap = std::min(start_gap, b.profile.v[i] - f.u[i]);
    v.require(start_gap >= 0.0, "step at sigma " + g(sigma) + " starts below Vbar (margin " + g(start_gap) + ")");

    SimConfig sim = cfg.sim;
    sim.snapshot_every = 1.0;
    double worst = INFINITY;
    std::size_t snaps = 0;
    EvolveHooks hooks;
    hooks.snapshot = [&](const Field& fl) {
        ++snaps;
        for (std::size_t i = 0; i < grid.size(); ++i)
            worst = std::min(worst, b.profile.v[i] - fl.u[i]);
    };
    evolve(f, p, sim, hooks);
    v.require(worst >= 0.0, std::to_string(snaps) + " snapshots up to t " + g(f.t) + ", min(Vbar - u) " + g(worst));
}

} // namespace

int main()
{
    Shared shared;
    const std::vector<std::function<void(Verdict&)>> criteria{
        criterion1,
        criterion2,
        criterion3,
        criterion4,
        criterion5,
        criterion6,
        criterion7,
        [&](Verdict& v) { criterion8(v, shared); },
        [&](Verdict& v) { criterion9(v, shared); },
        criterion10,
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i](v);
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += v.pass ? 0 : 1;
        std::printf("criterion %zu: %s (%.1f s) %s\n", i + 1, v.pass ? "PASS" : "FAIL", secs, v.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
