#pragma once

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "strip/errors.hpp"
#include "strip/grid.hpp"
#include "strip/pde.hpp"
#include "strip/phase_plane.hpp"
#include "strip/stationary.hpp"

namespace strip {

enum class Label { Residue, Transition, Undetermined, Spreading };

inline std::string_view to_string(Label l)
{
    switch (l) {
    case Label::Residue:
        return "residue";
    case Label::Transition:
        return "transition";
    case Label::Undetermined:
        return "undetermined";
    case Label::Spreading:
        return "spreading";
    }
    return "?";
}

/// Position in the order Residue < {Transition, Undetermined} < Spreading that
/// outcomes must respect along increasing shifts.
inline int rank(Label l)
{
    switch (l) {
    case Label::Residue:
        return 0;
    case Label::Spreading:
        return 2;
    default:
        return 1;
    }
}

struct Outcome {
    Label label = Label::Undetermined;
    std::optional<double> dist_vs; ///< nearest small-type stationary solution
    std::optional<double> dist_vg;
    std::optional<double> dist_vb;
    bool steady = false;
    bool certified = false; ///< labelled by the spreading certificate before steadiness
    double final_t = 0.0;
};

struct DynamicsConfig {
    SimConfig sim{};
    double h = 0.02;
    double margin = 40.0;       ///< grid reaches this far beyond the strip and any shift
    double classify_tol = 1e-3;
    double window = 20.0;       ///< classification window [-W, W], clipped to the grid
    bool certificate = true;    ///< false: audit mode, always run to steadiness
    double sigma_tol = 1e-4;
    double bump_gap = 1.0;      ///< certificate bump sits this far right of x0 + L

    void validate(double alpha) const
    {
        sim.validate(alpha);
        if (!(h > 0.0) || !(margin > 0.0) || !(classify_tol > 0.0) || !(window > 0.0) || !(sigma_tol > 0.0))
            throw DomainError("grid spacing, margin, classify_tol, window and sigma_tol must be positive");
    }
};

/// Grid covering the strip and shifts in [lo, hi] with cfg.margin to spare.
inline Grid1D dynamics_grid(const ModelParams& p, const DynamicsConfig& cfg, double lo, double hi)
{
    const double L = p.half_width();
    return Grid1D::aligned(L, cfg.h, -std::min(-L, lo) + cfg.margin, std::max(L, hi) + cfg.margin);
}

/// Stationary solutions and certificate bump sampled on one simulation grid.
struct ProfileSet {
    Grid1D grid;
    StationaryProfile vb;
    std::vector<StationaryProfile> small; ///< every small-type solution (root of ell(a) = 2L)
    std::optional<StationaryProfile> vg;
    double bump_peak = 0.0;
    double bump_center = 0.0;
    double bump_radius = 0.0;
    std::vector<std::pair<std::size_t, double>> bump; ///< (node, bump value) over the support

    static ProfileSet build(const ModelParams& p, const Grid1D& grid, double bump_gap = 1.0)
    {
        ProfileSet set{grid, build_profile(ProfileKind::Big, p, grid), {}, std::nullopt, 0.0, 0.0, 0.0, {}};
        const double alpha = p.alpha();
        const double L = p.half_width();
        const double Lc = critical_half_width(alpha);
        std::vector<double> wells;
        if (detail::near_critical(L, Lc))
            wells = {small_wells(alpha, Lc).front(), theta(alpha)};
        else
            wells = small_wells(alpha, L);
        for (double a : wells)
            set.small.push_back(build_profile(ProfileKind::Small, p, grid, {}, a));
        if (L > Lc && !detail::near_critical(L, Lc))
            set.vg = build_profile(ProfileKind::Ground, p, grid);

        // bump of peak (theta + 1)/2 placed on a node right of the strip
        const double a = 0.5 * (theta(alpha) + 1.0);
        const double h = grid.spacing();
        const double x0 = *build_compact_bump(alpha, a, Grid1D(-1.0, 1.0, 3)).support_radius;
        const double want = L + x0 + bump_gap;
        const auto k = static_cast<std::size_t>(std::ceil((want - grid.x_min()) / h));
        const double x1 = grid.node(k);
        if (x1 + x0 >= grid.x_max())
            throw DomainError("grid too short on the right for the spreading certificate");
        const Grid1D local(grid.x_min() - x1, grid.x_min() - x1 + static_cast<double>(grid.size() - 1) * h,
                           grid.size());
        const auto bump = build_compact_bump(alpha, a, local);
        set.bump_peak = a;
        set.bump_center = x1;
        set.bump_radius = x0;
        for (std::size_t i = 1; i + 1 < bump.size(); ++i) {
            const double node = std::round((bump.x[i] + x1 - grid.x_min()) / h);
            set.bump.emplace_back(static_cast<std::size_t>(node), bump.v[i]);
        }
        return set;
    }

    Window window(double w) const
    {
        const double half = std::min({w, grid.x_max() - 10.0, -grid.x_min() - 10.0});
        if (!(half > 0.0))
            throw DomainError("grid too small for a classification window");
        return {-half, half};
    }
};

/// True when the field lies above the compact bump placed right of the
/// strip; from then on the solution spreads.
inline bool spreading_certificate(const Field& f, const ProfileSet& set)
{
    if (!(f.grid == set.grid))
        throw DomainError("certificate bump was built for a different grid");
    for (const auto& [i, v] : set.bump)
        if (f.u[i] < v)
            return false;
    return true;
}

namespace detail {

inline void fill_distances(Outcome& out, const Field& f, const ProfileSet& set, Window w)
{
    out.dist_vb = sup_distance(f, set.vb, w);
    for (const auto& s : set.small) {
        const double d = sup_distance(f, s, w);
        out.dist_vs = out.dist_vs ? std::min(*out.dist_vs, d) : d;
    }
    if (set.vg)
        out.dist_vg = sup_distance(f, *set.vg, w);
}

/// Winner below tol and runner-up above 2 tol, else Undetermined.
inline Label margin_rule(const Outcome& out, double tol)
{
    std::vector<std::pair<double, Label>> c;
    if (out.dist_vs)
        c.emplace_back(*out.dist_vs, Label::Residue);
    if (out.dist_vg)
        c.emplace_back(*out.dist_vg, Label::Transition);
    if (out.dist_vb)
        c.emplace_back(*out.dist_vb, Label::Spreading);
    std::sort(c.begin(), c.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    if (c.empty() || !(c[0].first < tol))
        return Label::Undetermined;
    if (c.size() > 1 && !(c[1].first > 2.0 * tol))
        return Label::Undetermined;
    return c[0].second;
}

} // namespace detail

/// Long-time fate of the solution from `data` on the grid of `set`.
inline Outcome classify(const ModelParams& p, const InitialData& data, const DynamicsConfig& cfg, const ProfileSet& set)
{
    cfg.validate(p.alpha());
    data.validate(p.alpha());
    Field f = make_initial(data, set.grid);
    EvolveHooks hooks;
    bool certified = false;
    if (cfg.certificate)
        hooks.unit_time = [&](const Field& fl) { return certified = spreading_certificate(fl, set); };
    const EvolveResult res = evolve(f, p, cfg.sim, hooks);
    Outcome out;
    out.steady = res.steady;
    out.final_t = f.t;
    detail::fill_distances(out, f, set, set.window(cfg.window));
    if (certified) {
        out.certified = true;
        out.label = Label::Spreading;
    } else if (res.steady) {
        out.label = detail::margin_rule(out, cfg.classify_tol);
    }
    return out;
}

/// Convenience overload building its own grid and profiles.
inline Outcome classify(const ModelParams& p, const InitialData& data, const DynamicsConfig& cfg)
{
    cfg.validate(p.alpha());
    const Grid1D grid = dynamics_grid(p, cfg, data.shift, data.shift);
    return classify(p, data, cfg, ProfileSet::build(p, grid, cfg.bump_gap));
}

struct Bracket {
    double lo;
    double hi;
    double mid() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
};

struct ThresholdResult {
    std::optional<Bracket> sigma_lower; ///< Residue below lo, not Residue at hi
    std::optional<Bracket> sigma_upper; ///< not Spreading at lo, Spreading at hi
    bool all_spreading = false;
    Bracket searched{0.0, 0.0};
    std::vector<std::pair<double, Outcome>> log; ///< sorted by sigma
};

namespace detail {

class ThresholdSearch {
public:
    ThresholdSearch(const ModelParams& p, InitialData base, const DynamicsConfig& cfg, Bracket b)
        : p_(p), base_(base), cfg_(cfg), set_(ProfileSet::build(p, dynamics_grid(p, cfg, b.lo, b.hi), cfg.bump_gap))
    {
    }

    const Outcome& at(double sigma)
    {
        auto it = log_.find(sigma);
        if (it == log_.end())
            it = log_.emplace(sigma, classify(p_, base_.shifted(sigma), cfg_, set_)).first;
        return it->second;
    }

    /// Bisects the boundary of {rank <= r}, starting from the tightest logged pair.
    Bracket refine(int r)
    {
        double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
        for (const auto& [s, o] : log_) {
            if (rank(o.label) <= r)
                lo = std::max(lo, s);
            else
                hi = std::min(hi, s);
        }
        if (!(lo < hi))
            throw NumericalError("outcome log is not monotone in sigma");
        while (hi - lo >= cfg_.sigma_tol) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi)
                break;
            if (rank(at(mid).label) <= r)
                lo = mid;
            else
                hi = mid;
        }
        return {lo, hi};
    }

    void check_monotone() const
    {
        int prev = -1;
        for (const auto& [s, o] : log_) {
            if (rank(o.label) < prev)
                throw NumericalError("outcome log is not monotone in sigma (at sigma = " + std::to_string(s) + ")");
            prev = rank(o.label);
        }
    }

    std::vector<std::pair<double, Outcome>> log() const { return {log_.begin(), log_.end()}; }

private:
    ModelParams p_;
    InitialData base_;
    DynamicsConfig cfg_;
    ProfileSet set_;
    std::map<double, Outcome> log_;
};

} // namespace detail

/// Locates sigma_* (end of Residue) and sigma^* (start of Spreading) for the
/// shifted family base(x - sigma) by two monotone bisections.
///
/// The bracket must give Residue at its low end and Spreading at its high end;
/// otherwise it is widened once about its centre to twice the width. If the low
/// end still spreads the all-spreading result is returned.
inline ThresholdResult find_thresholds(const ModelParams& p, const InitialData& base, const DynamicsConfig& cfg,
                                       Bracket bracket)
{
    cfg.validate(p.alpha());
    base.validate(p.alpha());
    if (!(bracket.lo < bracket.hi))
        throw DomainError("threshold bracket must satisfy lo < hi");
    for (int attempt = 0; attempt < 2; ++attempt) {
        detail::ThresholdSearch search(p, base, cfg, bracket);
        const Label lo = search.at(bracket.lo).label;
        const Label hi = search.at(bracket.hi).label;
        if (lo == Label::Residue && hi == Label::Spreading) {
            ThresholdResult res;
            res.searched = bracket;
            res.sigma_lower = search.refine(rank(Label::Residue));
            res.sigma_upper = search.refine(rank(Label::Transition));
            search.check_monotone();
            res.log = search.log();
            return res;
        }
        if (attempt == 1) {
            if (lo == Label::Spreading) {
                ThresholdResult res;
                res.all_spreading = true;
                res.searched = bracket;
                res.log = search.log();
                return res;
            }
            throw BracketError("threshold bracket [" + std::to_string(bracket.lo) + ", " +
                               std::to_string(bracket.hi) + "] gives " + std::string(to_string(lo)) + " / " +
                               std::string(to_string(hi)) + " at its ends, expected residue / spreading");
        }
        const double c = bracket.mid(), w = bracket.width();
        bracket = {c - w, c + w};
    }
    throw NumericalError("unreachable");
}

struct ShadowingResult {
    double min_distance = std::numeric_limits<double>::infinity();
    double time_of_min = 0.0;
    std::vector<std::pair<double, double>> trace; ///< (t, sup distance to Vg) every unit time
};

/// Distance to the transition solution recorded each unit time up to t_max.
inline ShadowingResult ground_shadowing(const ModelParams& p, const InitialData& data, const DynamicsConfig& cfg,
                                        const ProfileSet& set)
{
    cfg.validate(p.alpha());
    if (!set.vg)
        throw RegimeError("ground shadowing needs L > L*");
    const Window w = set.window(cfg.window);
    ShadowingResult res;
    Field f = make_initial(data, set.grid);
    SimConfig sim = cfg.sim;
    sim.steady_tol = std::numeric_limits<double>::min();
    EvolveHooks hooks;
    hooks.unit_time = [&](const Field& fl) {
        const double d = sup_distance(fl, *set.vg, w);
        if (!std::isfinite(d))
            throw NumericalError("non-finite shadowing distance");
        res.trace.emplace_back(fl.t, d);
        if (d < res.min_distance) {
            res.min_distance = d;
            res.time_of_min = fl.t;
        }
        return false;
    };
    evolve(f, p, sim, hooks);
    return res;
}

enum class Regime { Spreading, Dichotomy, Trichotomy };

inline std::string_view to_string(Regime r)
{
    switch (r) {
    case Regime::Spreading:
        return "spreading";
    case Regime::Dichotomy:
        return "dichotomy";
    case Regime::Trichotomy:
        return "trichotomy";
    }
    return "?";
}

inline Regime regime_of(const ModelParams& p)
{
    const double Lc = critical_half_width(p.alpha());
    if (detail::near_critical(p.half_width(), Lc))
        return Regime::Dichotomy;
    return p.half_width() < Lc ? Regime::Spreading : Regime::Trichotomy;
}

struct SweepRow {
    double L = 0.0;
    double Lstar = 0.0;
    Regime regime = Regime::Spreading;
    std::optional<ThresholdResult> thresholds;
    std::string error; ///< non-empty when the row failed
};

/// One row per L, in input order; rows run on up to `workers` threads and a
/// failing row records its error without stopping the others.
inline std::vector<SweepRow> regime_sweep(double alpha, const std::vector<double>& L_values, const InitialData& base,
                                          const DynamicsConfig& cfg, Bracket bracket, unsigned workers = 1)
{
    ModelParams::check_alpha(alpha);
    const double Lc = critical_half_width(alpha);
    std::vector<SweepRow> rows(L_values.size());
    std::size_t next = 0;
    std::mutex m;
    auto work = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> lock(m);
                if (next >= rows.size())
                    return;
                i = next++;
            }
            SweepRow& row = rows[i];
            row.L = L_values[i];
            row.Lstar = Lc;
            try {
                const ModelParams p(alpha, L_values[i]);
                row.regime = regime_of(p);
                row.thresholds = find_thresholds(p, base, cfg, bracket);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(rows.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n; ++k)
        pool.emplace_back(work);
    work();
    for (auto& t : pool)
        t.join();
    return rows;
}

} // namespace strip
