// strip: command-line front end for the hostile-strip bistable model.

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "strip/barrier.hpp"
#include "strip/dynamics.hpp"
#include "strip/io.hpp"
#include "strip/phase_plane.hpp"
#include "strip/stationary.hpp"

namespace fs = std::filesystem;
using namespace strip;

namespace {

constexpr int kExitDomain = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUndetermined = 4;

struct UndeterminedResult : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string quote(const std::string& s)
{
    std::ostringstream os;
    os << std::quoted(s);
    return os.str();
}

void error_line(const char* kind, const std::string& what)
{
    std::cerr << "error: kind=" << kind << " message=" << quote(what) << "\n";
}

std::string now_utc()
{
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

// -- shared option groups ----------------------------------------------------

struct Common {
    std::string out_dir;
    std::string config; // consumed before parsing; registered so --help lists it
};

struct ModelOpts {
    double alpha = 0.25;
    double L = 0.0;
    bool L_in_lstar = false;

    ModelParams params() const
    {
        ModelParams::check_alpha(alpha);
        return ModelParams(alpha, L_in_lstar ? L * critical_half_width(alpha) : L);
    }
};

struct DataOpts {
    std::string family = "step";
    double sigma = 0.0;
    double k = 1.0;

    InitialData data() const
    {
        InitialData d;
        d.family = parse_family(family);
        d.shift = sigma;
        d.steepness = k;
        return d;
    }
};

struct DynOpts {
    DynamicsConfig cfg;
    bool no_certificate = false;

    DynamicsConfig get() const
    {
        DynamicsConfig c = cfg;
        c.certificate = !no_certificate;
        return c;
    }
};

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--out", c.out_dir, "output directory (default $STRIP_OUTPUT_DIR or .)");
    sub->add_option("--config", c.config, "key = value file; flags on the command line win");
}

void add_alpha(CLI::App* sub, ModelOpts& m) { sub->add_option("--alpha", m.alpha, "bistable threshold in (0, 1/2)"); }

void add_model(CLI::App* sub, ModelOpts& m)
{
    add_alpha(sub, m);
    sub->add_option("--L", m.L, "strip half-width")->required();
    sub->add_flag("--L-in-lstar", m.L_in_lstar, "read --L in units of the critical half-width");
}

void add_data(CLI::App* sub, DataOpts& d, bool with_sigma)
{
    sub->add_option("--family", d.family, "initial data: step or logistic");
    if (with_sigma)
        sub->add_option("--sigma", d.sigma, "shift of the initial front");
    sub->add_option("--k", d.k, "steepness of the logistic front");
}

void add_dynamics(CLI::App* sub, DynOpts& o)
{
    auto& c = o.cfg;
    sub->add_option("--dx", c.h, "grid spacing");
    sub->add_option("--dt", c.sim.dt, "time step");
    sub->add_option("--tmax", c.sim.t_max, "final time");
    sub->add_option("--steady-tol", c.sim.steady_tol, "unit-time sup increment counted as steady");
    sub->add_option("--margin", c.margin, "grid extent beyond the strip and the shifts");
    sub->add_option("--window", c.window, "classification window half-width");
    sub->add_option("--classify-tol", c.classify_tol, "sup distance accepted as convergence");
    sub->add_option("--bump-gap", c.bump_gap, "gap between the strip and the certificate bump");
    sub->add_flag("--no-certificate", o.no_certificate, "always run to steadiness");
}

fs::path out_dir(const Common& c)
{
    std::string dir = c.out_dir;
    if (dir.empty()) {
        const char* env = std::getenv("STRIP_OUTPUT_DIR");
        dir = env && *env ? env : ".";
    }
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_out(const fs::path& p)
{
    std::ofstream os(p);
    if (!os)
        throw DomainError("cannot write '" + p.string() + "'");
    return os;
}

void write_manifest(const fs::path& p, io::Manifest m, const std::string& command)
{
    m.set("command", command);
    m.set("written_at", now_utc());
    auto os = open_out(p);
    m.write(os);
}

std::vector<double> parse_list(const std::string& s, const char* what)
{
    std::vector<double> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        out.push_back(io::parse_number(io::trim(item), what));
    if (out.empty())
        throw DomainError(std::string(what) + " is empty");
    return out;
}

Bracket parse_bracket(const std::string& s)
{
    const auto v = parse_list(s, "bracket");
    if (v.size() != 2 || !(v[0] < v[1]))
        throw DomainError("bracket must be 'lo,hi' with lo < hi");
    return {v[0], v[1]};
}

// -- commands ---------------------------------------------------------------

int cmd_critical_width(const ModelOpts& m, std::size_t points)
{
    ModelParams::check_alpha(m.alpha);
    const double alpha = m.alpha;
    const double Ls = critical_half_width(alpha);
    const auto rows = span_curve(alpha, log_a_grid(alpha, points));
    double inf = rows.front().ell.value();
    for (const auto& r : rows)
        inf = std::min(inf, *r.ell);
    const EllMinimum mn = ell_minimum(alpha);
    const double rel = std::abs(0.5 * inf - Ls) / Ls;
    std::cout << "alpha = " << io::num(alpha) << "\n";
    std::cout << "theta = " << io::num(theta(alpha)) << "\n";
    std::cout << "Lstar = " << io::num(Ls) << "\n";
    std::cout << "grid_infimum_half_ell = " << io::num(0.5 * inf) << "\n";
    std::cout << "grid_points = " << points << "\n";
    std::cout << "relative_difference = " << io::num(rel) << "\n";
    std::cout << "routes_agree = " << (rel < 1e-6 ? "true" : "false") << "\n";
    std::cout << "min_half_ell = " << io::num(0.5 * mn.ell) << "\n";
    std::cout << "min_half_ell_at_a = " << io::num(mn.a) << "\n";
    if (mn.a < theta(alpha))
        std::cout << "note = ell has an interior minimum below ell(theta); small-type solutions already exist for L >= "
                  << io::num(0.5 * mn.ell) << "\n";
    return 0;
}

int cmd_ell_curve(const ModelOpts& m, std::size_t points, double a_min, const Common& c, std::string name)
{
    ModelParams::check_alpha(m.alpha);
    const auto rows = span_curve(m.alpha, log_a_grid(m.alpha, points, a_min));
    std::size_t violations = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        violations += *rows[i].ell < *rows[i - 1].ell ? 0 : 1;
    const fs::path path = out_dir(c) / name;
    auto os = open_out(path);
    io::write_ell_curve_csv(os, rows);
    std::cout << "wrote " << path.string() << " (" << rows.size() << " rows)\n";
    std::cout << "monotonicity_violations = " << violations << "\n";
    std::cout << "terminal_ell = " << io::num(*rows.back().ell) << "\n";
    std::cout << "two_Lstar = " << io::num(2.0 * critical_half_width(m.alpha)) << "\n";
    return 0;
}

struct StationaryOpts {
    std::string kind = "big";
    double h = 0.01;
    double extent = 40.0;
    double a = 0.0;
    std::string well = "upper";
    double gate = 0.0;
    std::size_t samples = 2001;
};

int cmd_stationary(const ModelOpts& m, const StationaryOpts& o, const Common& c, std::string name)
{
    const ProfileKind kind = parse_profile_kind(o.kind);
    if (!(o.h > 0.0) || !(o.extent > 0.0))
        throw DomainError("--dx and --extent must be positive");
    const double gate = o.gate > 0.0 ? o.gate : 10.0 * o.h * o.h;
    ModelParams::check_alpha(m.alpha);
    StationaryProfile prof;
    io::Manifest man;
    std::optional<ModelParams> p;
    if (kind == ProfileKind::CompactBump || kind == ProfileKind::Periodic) {
        if (!(o.a > 0.0))
            throw DomainError("--a is required for " + std::string(to_string(kind)));
        p = ModelParams::without_strip(m.alpha);
        if (kind == ProfileKind::CompactBump)
            prof = build_compact_bump(m.alpha, o.a, Grid1D::uniform_spacing(-o.extent, o.extent, o.h));
        else
            prof = build_periodic(m.alpha, o.a, o.samples);
        man.set("alpha", m.alpha);
    } else {
        if (m.L == 0.0)
            throw DomainError("--L is required for " + std::string(to_string(kind)));
        p = m.params();
        const Grid1D grid = Grid1D::aligned(p->half_width(), o.h, p->half_width() + o.extent,
                                            p->half_width() + o.extent);
        man.params(*p);
        man.grid(grid);
        if (kind == ProfileKind::Barrier) {
            const Barrier b = build_barrier(*p, grid);
            prof = b.profile;
            man.set("epsilon", b.epsilon);
            man.set("floor", b.floor);
            man.set("corner_jump", b.corner_jump);
        } else if (kind == ProfileKind::Small && o.well == "lower") {
            const auto wells = small_wells(m.alpha, p->half_width());
            if (wells.size() < 2)
                throw RegimeError("only one small-type solution exists at this L");
            prof = build_profile(kind, *p, grid, {}, wells.front());
        } else {
            if (o.well != "upper" && o.well != "lower")
                throw DomainError("--well must be upper or lower");
            prof = build_profile(kind, *p, grid);
        }
    }
    if (kind == ProfileKind::Barrier) {
        const double defect = upper_solution_defect(prof, *p);
        man.set("upper_solution_defect", defect);
        if (defect < -1e-8)
            throw NumericalError("barrier fails the upper-solution check (defect " + io::num(defect) + ")");
    } else {
        const double res = ode_residual(prof, *p);
        man.set("ode_residual", res);
        man.set("residual_gate", gate);
        if (!(res < gate))
            throw NumericalError("profile residual " + io::num(res) + " exceeds the gate " + io::num(gate) +
                                 "; refine --dx or raise --residual-gate");
    }
    man.set("kind", to_string(kind));
    man.set("a", prof.a);
    man.set("matching_dv", prof.matching_dv);
    man.set("matching_dw", prof.matching_dw);
    const fs::path dir = out_dir(c);
    const fs::path path = dir / name;
    auto os = open_out(path);
    io::write_profile_csv(os, prof);
    write_manifest(dir / (fs::path(name).stem().string() + ".manifest"), man, "stationary");
    std::cout << "wrote " << path.string() << " (" << prof.size() << " samples)\n";
    std::cout << "a = " << io::num(prof.a) << "\n";
    return 0;
}

int cmd_simulate(const ModelOpts& m, const DataOpts& d, const DynOpts& o, double snapshots, const Common& c,
                 std::string name)
{
    const ModelParams p = m.params();
    const InitialData data = d.data();
    DynamicsConfig cfg = o.get();
    cfg.sim.snapshot_every = snapshots;
    cfg.validate(p.alpha());
    data.validate(p.alpha());
    const Grid1D grid = dynamics_grid(p, cfg, data.shift, data.shift);
    const ProfileSet set = ProfileSet::build(p, grid, cfg.bump_gap);

    const fs::path dir = out_dir(c);
    const fs::path path = dir / name;
    auto os = open_out(path);
    io::write_snapshot_header(os);

    Field f = make_initial(data, grid);
    EvolveHooks hooks;
    double last_written = -1.0;
    if (snapshots > 0.0)
        hooks.snapshot = [&](const Field& fl) {
            io::write_snapshot_rows(os, fl);
            last_written = fl.t;
        };
    bool certified = false;
    if (cfg.certificate)
        hooks.unit_time = [&](const Field& fl) { return certified = spreading_certificate(fl, set); };
    const EvolveResult res = evolve(f, p, cfg.sim, hooks);
    if (last_written != f.t)
        io::write_snapshot_rows(os, f);

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

    io::Manifest man;
    man.params(p);
    man.data(data);
    man.dynamics(cfg);
    man.grid(grid);
    man.set("last_increment", res.last_increment);
    man.outcome(out);
    write_manifest(dir / (fs::path(name).stem().string() + ".manifest"), man, "simulate");
    std::cout << "wrote " << path.string() << "\n";
    std::cout << "label = " << to_string(out.label) << "\n";
    std::cout << "final_t = " << io::num(out.final_t) << "\n";
    std::cout << "dist_Vb = " << io::num(out.dist_vb) << "\n";
    if (out.dist_vs)
        std::cout << "dist_Vs = " << io::num(out.dist_vs) << "\n";
    if (out.dist_vg)
        std::cout << "dist_Vg = " << io::num(out.dist_vg) << "\n";
    if (out.label == Label::Undetermined)
        throw UndeterminedResult("classification undetermined (steady=" + std::string(out.steady ? "true" : "false") +
                                 ")");
    return 0;
}

void describe(std::ostream& os, const char* key, const std::optional<Bracket>& b)
{
    if (b)
        os << key << " = [" << io::num(b->lo) << ", " << io::num(b->hi) << "]\n";
}

int cmd_threshold(const ModelOpts& m, const DataOpts& d, const DynOpts& o, const std::string& bracket,
                  double sigma_tol, const Common& c, std::string name)
{
    const ModelParams p = m.params();
    DynamicsConfig cfg = o.get();
    cfg.sigma_tol = sigma_tol;
    const InitialData base = d.data();
    const Bracket b = parse_bracket(bracket);
    const ThresholdResult r = find_thresholds(p, base, cfg, b);
    const fs::path dir = out_dir(c);
    const fs::path path = dir / name;
    auto os = open_out(path);
    io::write_threshold_csv(os, r);
    io::Manifest man;
    man.params(p);
    man.set("family", to_string(base.family));
    if (base.family == InitialData::Family::LogisticFront)
        man.set("steepness", base.steepness);
    man.dynamics(cfg);
    man.set("regime", to_string(regime_of(p)));
    man.set("bracket.lo", r.searched.lo);
    man.set("bracket.hi", r.searched.hi);
    man.set("all_spreading", r.all_spreading);
    if (r.sigma_lower) {
        man.set("sigma_lower.lo", r.sigma_lower->lo);
        man.set("sigma_lower.hi", r.sigma_lower->hi);
    }
    if (r.sigma_upper) {
        man.set("sigma_upper.lo", r.sigma_upper->lo);
        man.set("sigma_upper.hi", r.sigma_upper->hi);
    }
    man.set("classifications", static_cast<double>(r.log.size()));
    write_manifest(dir / (fs::path(name).stem().string() + ".manifest"), man, "threshold");
    std::cout << "wrote " << path.string() << " (" << r.log.size() << " classifications)\n";
    std::cout << "regime = " << to_string(regime_of(p)) << "\n";
    if (r.all_spreading)
        std::cout << "all_spreading = true\n";
    describe(std::cout, "sigma_lower", r.sigma_lower);
    describe(std::cout, "sigma_upper", r.sigma_upper);
    return 0;
}

int cmd_sweep(const ModelOpts& m, const DataOpts& d, const DynOpts& o, const std::string& Ls, const std::string& bracket,
              double sigma_tol, unsigned workers, const Common& c, std::string name)
{
    ModelParams::check_alpha(m.alpha);
    DynamicsConfig cfg = o.get();
    cfg.sigma_tol = sigma_tol;
    cfg.validate(m.alpha);
    const InitialData base = d.data();
    base.validate(m.alpha);
    auto values = parse_list(Ls, "L list");
    if (m.L_in_lstar)
        for (auto& v : values)
            v *= critical_half_width(m.alpha);
    const auto rows = regime_sweep(m.alpha, values, base, cfg, parse_bracket(bracket), workers);
    const fs::path dir = out_dir(c);
    const fs::path path = dir / name;
    auto os = open_out(path);
    io::write_sweep_csv(os, rows);
    io::Manifest man;
    man.set("alpha", m.alpha);
    man.set("Lstar", critical_half_width(m.alpha));
    man.set("family", to_string(base.family));
    man.dynamics(cfg);
    man.set("bracket", bracket);
    man.set("workers", static_cast<double>(workers));
    std::size_t failed = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (!rows[i].error.empty()) {
            ++failed;
            man.set("row." + std::to_string(i) + ".error", rows[i].error);
            error_line("row", "L = " + io::num(rows[i].L) + ": " + rows[i].error);
        }
    man.set("failed_rows", static_cast<double>(failed));
    write_manifest(dir / (fs::path(name).stem().string() + ".manifest"), man, "sweep");
    std::cout << "wrote " << path.string() << " (" << rows.size() << " rows, " << failed << " failed)\n";
    return failed ? kExitNumerical : 0;
}

// -- config file injection --------------------------------------------------

/// Moves `--config FILE` entries in front of the command-line flags so the
/// later (command-line) occurrence wins under the take-last policy.
std::vector<std::string> expand_config(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string file;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            file = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            file = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (file.empty())
        return rest;
    std::vector<std::string> out;
    std::size_t k = 0;
    // keep the subcommand name first
    while (k < rest.size() && rest[k].rfind("-", 0) == 0)
        out.push_back(rest[k++]);
    if (k < rest.size())
        out.push_back(rest[k++]);
    for (const auto& e : io::read_config(file))
        out.push_back("--" + e.key + "=" + e.value);
    out.insert(out.end(), rest.begin() + static_cast<std::ptrdiff_t>(k), rest.end());
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bistable reaction-diffusion with a hostile strip (-L, L)"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    Common common;
    ModelOpts model;
    DataOpts data;
    DynOpts dyn;
    std::string name;
    std::size_t points = 200;
    double a_min = 1e-4;
    std::size_t check_points = 2000;
    StationaryOpts st;
    double snapshots = 0.0;
    std::string bracket = "-60,60";
    double sigma_tol = 1e-4;
    std::string L_list;
    unsigned workers = 1;

    auto* cw = app.add_subcommand("critical-width", "critical half-width L*, theta and the grid cross-check");
    add_alpha(cw, model);
    cw->add_option("--points", check_points, "log-spaced points for the grid infimum");

    auto* ec = app.add_subcommand("ell-curve", "spans R, r, ell against the well depth a");
    add_common(ec, common);
    add_alpha(ec, model);
    ec->add_option("--points", points, "log-spaced values of a ending at theta");
    ec->add_option("--a-min", a_min, "smallest a");
    ec->add_option("--output", name, "file name inside the output directory");

    auto* sp = app.add_subcommand("stationary", "sample a stationary profile");
    add_common(sp, common);
    add_alpha(sp, model);
    sp->add_option("--L", model.L, "strip half-width");
    sp->add_flag("--L-in-lstar", model.L_in_lstar, "read --L in units of the critical half-width");
    sp->add_option("--kind", st.kind, "big, small, ground, bump, periodic or barrier");
    sp->add_option("--dx", st.h, "grid spacing");
    sp->add_option("--extent", st.extent, "grid extent beyond the strip");
    sp->add_option("--a", st.a, "peak of the bump or minimum of the periodic orbit");
    sp->add_option("--well", st.well, "small solution to emit when two exist: upper or lower");
    sp->add_option("--samples", st.samples, "samples over one period");
    sp->add_option("--residual-gate", st.gate, "largest accepted ODE residual (default 10 h^2)");
    sp->add_option("--output", name, "file name inside the output directory");

    auto* sim = app.add_subcommand("simulate", "evolve one initial front and classify it");
    add_common(sim, common);
    add_model(sim, model);
    add_data(sim, data, true);
    add_dynamics(sim, dyn);
    sim->add_option("--snapshots", snapshots, "snapshot interval; 0 writes only the final field");
    sim->add_option("--output", name, "file name inside the output directory");

    auto* th = app.add_subcommand("threshold", "bisect the shift thresholds sigma_* and sigma^*");
    add_common(th, common);
    add_model(th, model);
    add_data(th, data, false);
    add_dynamics(th, dyn);
    th->add_option("--bracket", bracket, "initial shift bracket lo,hi");
    th->add_option("--sigma-tol", sigma_tol, "final bracket width");
    th->add_option("--output", name, "file name inside the output directory");

    auto* sw = app.add_subcommand("sweep", "regime and thresholds over a list of half-widths");
    add_common(sw, common);
    add_alpha(sw, model);
    sw->add_option("--L", L_list, "comma-separated half-widths")->required();
    sw->add_flag("--L-in-lstar", model.L_in_lstar, "read --L in units of the critical half-width");
    add_data(sw, data, false);
    add_dynamics(sw, dyn);
    sw->add_option("--bracket", bracket, "initial shift bracket lo,hi");
    sw->add_option("--sigma-tol", sigma_tol, "final bracket width");
    sw->add_option("--workers", workers, "parallel rows");
    sw->add_option("--output", name, "file name inside the output directory");
    cw->add_option("--config", common.config, "key = value file; flags on the command line win");

    try {
        auto args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        error_line("domain", e.what());
        return kExitDomain;
    } catch (const DomainError& e) {
        error_line("domain", e.what());
        return kExitDomain;
    }

    auto named = [&](const char* fallback) { return name.empty() ? std::string(fallback) : name; };
    try {
        if (cw->parsed())
            return cmd_critical_width(model, check_points);
        if (ec->parsed())
            return cmd_ell_curve(model, points, a_min, common, named("ell_curve.csv"));
        if (sp->parsed())
            return cmd_stationary(model, st, common, named("profile.csv"));
        if (sim->parsed())
            return cmd_simulate(model, data, dyn, snapshots, common, named("snapshots.csv"));
        if (th->parsed())
            return cmd_threshold(model, data, dyn, bracket, sigma_tol, common, named("threshold.csv"));
        if (sw->parsed())
            return cmd_sweep(model, data, dyn, L_list, bracket, sigma_tol, workers, common, named("sweep.csv"));
    } catch (const RegimeError& e) {
        error_line("regime", e.what());
        return kExitDomain;
    } catch (const DomainError& e) {
        error_line("domain", e.what());
        return kExitDomain;
    } catch (const UndeterminedResult& e) {
        error_line("undetermined", e.what());
        return kExitUndetermined;
    } catch (const NumericalError& e) {
        error_line("numerical", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        error_line("numerical", e.what());
        return kExitNumerical;
    }
    return 0;
}
