#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "strip/dynamics.hpp"
#include "strip/errors.hpp"
#include "strip/pde.hpp"
#include "strip/phase_plane.hpp"
#include "strip/stationary.hpp"

namespace strip::io {

/// Shortest-safe decimal form: 17 significant digits round-trip any double.
inline std::string num(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

inline double parse_number(std::string_view s, std::string_view what = "value")
{
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw DomainError("cannot parse " + std::string(what) + " '" + std::string(s) + "' as a number");
    return v;
}

// -- config files -----------------------------------------------------------

struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
};

inline std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Flat `key = value` lines; `#` starts a comment, blank lines are skipped.
inline std::vector<ConfigEntry> parse_config(std::istream& in, std::string_view source = "config")
{
    std::vector<ConfigEntry> out;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view s = raw;
        if (const auto hash = s.find('#'); hash != std::string_view::npos)
            s = s.substr(0, hash);
        s = trim(s);
        if (s.empty())
            continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos)
            throw DomainError(std::string(source) + ":" + std::to_string(line) + ": expected key = value");
        ConfigEntry e{std::string(trim(s.substr(0, eq))), std::string(trim(s.substr(eq + 1))), line};
        if (e.key.empty())
            throw DomainError(std::string(source) + ":" + std::to_string(line) + ": empty key");
        if (e.value.empty())
            throw DomainError(std::string(source) + ":" + std::to_string(line) + ": empty value for '" + e.key + "'");
        out.push_back(std::move(e));
    }
    return out;
}

inline std::vector<ConfigEntry> read_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw DomainError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

// -- CSV writers ------------------------------------------------------------

inline void write_profile_csv(std::ostream& os, const StationaryProfile& prof)
{
    os << "# kind=" << to_string(prof.kind) << "\n";
    os << "# alpha=" << num(prof.params.alpha()) << "\n";
    os << "# L=" << num(prof.params.half_width()) << "\n";
    os << "# a=" << num(prof.a) << "\n";
    os << "# center_shift=" << num(prof.center_shift) << "\n";
    auto meta = [&](const char* key, const std::optional<double>& v) {
        if (v)
            os << "# " << key << "=" << num(*v) << "\n";
    };
    meta("x_min_point", prof.x_min_point);
    meta("x_max_point", prof.x_max_point);
    meta("support_radius", prof.support_radius);
    meta("period", prof.period);
    meta("plateau_level", prof.plateau_level);
    meta("corner", prof.corner);
    os << "x,v\n";
    for (std::size_t i = 0; i < prof.size(); ++i)
        os << num(prof.x[i]) << "," << num(prof.v[i]) << "\n";
}

inline void write_ell_curve_csv(std::ostream& os, const std::vector<SpanTable>& rows)
{
    os << "a,v1,v2,R,r,ell\n";
    for (const auto& r : rows)
        os << num(r.a) << "," << num(r.v1) << "," << num(r.v2) << "," << num(r.big_span) << ","
           << num(r.small_span) << "," << num(r.ell) << "\n";
}

inline void write_snapshot_header(std::ostream& os) { os << "t,x,u\n"; }

inline void write_snapshot_rows(std::ostream& os, const Field& f)
{
    const std::string t = num(f.t);
    for (std::size_t i = 0; i < f.u.size(); ++i)
        os << t << "," << num(f.grid.node(i)) << "," << num(f.u[i]) << "\n";
}

inline void write_threshold_csv(std::ostream& os, const ThresholdResult& r)
{
    os << "sigma,outcome,dist_Vs,dist_Vg,dist_Vb,final_t\n";
    for (const auto& [s, o] : r.log)
        os << num(s) << "," << to_string(o.label) << "," << num(o.dist_vs) << "," << num(o.dist_vg) << ","
           << num(o.dist_vb) << "," << num(o.final_t) << "\n";
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows)
{
    os << "L,Lstar,regime,sigma_lower_lo,sigma_lower_hi,sigma_upper_lo,sigma_upper_hi\n";
    for (const auto& row : rows) {
        std::optional<Bracket> lower, upper;
        if (row.thresholds) {
            lower = row.thresholds->sigma_lower;
            upper = row.thresholds->sigma_upper;
        }
        auto lo = [](const std::optional<Bracket>& b) { return b ? num(b->lo) : std::string(); };
        auto hi = [](const std::optional<Bracket>& b) { return b ? num(b->hi) : std::string(); };
        const std::string_view regime = row.error.empty() ? to_string(row.regime) : "error";
        os << num(row.L) << "," << num(row.Lstar) << "," << regime << "," << lo(lower) << ","
           << hi(lower) << "," << lo(upper) << "," << hi(upper) << "\n";
    }
}

// -- run manifest -----------------------------------------------------------

/// Ordered key = value record of a run, readable back with parse_config.
class Manifest {
public:
    void set(std::string key, std::string value)
    {
        for (auto& [k, v] : entries_)
            if (k == key) {
                v = std::move(value);
                return;
            }
        entries_.emplace_back(std::move(key), std::move(value));
    }
    void set(std::string key, double value) { set(std::move(key), num(value)); }
    void set(std::string key, std::string_view value) { set(std::move(key), std::string(value)); }
    void set(std::string key, const char* value) { set(std::move(key), std::string(value)); }
    void set(std::string key, bool value) { set(std::move(key), std::string(value ? "true" : "false")); }

    void params(const ModelParams& p)
    {
        set("alpha", p.alpha());
        set("L", p.half_width());
        set("Lstar", critical_half_width(p.alpha()));
    }

    void grid(const Grid1D& g)
    {
        set("grid.x_min", g.x_min());
        set("grid.x_max", g.x_max());
        set("grid.h", g.spacing());
        set("grid.points", static_cast<double>(g.size()));
    }

    void sim(const SimConfig& c)
    {
        set("dt", c.dt);
        set("t_max", c.t_max);
        set("steady_tol", c.steady_tol);
        set("snapshot_every", c.snapshot_every);
    }

    void data(const InitialData& d)
    {
        set("family", to_string(d.family));
        set("sigma", d.shift);
        if (d.family == InitialData::Family::LogisticFront)
            set("steepness", d.steepness);
    }

    void dynamics(const DynamicsConfig& c)
    {
        sim(c.sim);
        set("h", c.h);
        set("margin", c.margin);
        set("classify_tol", c.classify_tol);
        set("window", c.window);
        set("certificate", c.certificate);
        set("sigma_tol", c.sigma_tol);
        set("bump_gap", c.bump_gap);
    }

    void outcome(const Outcome& o, std::string_view prefix = "outcome")
    {
        const std::string p(prefix);
        set(p + ".label", to_string(o.label));
        set(p + ".steady", o.steady);
        set(p + ".certified", o.certified);
        set(p + ".final_t", o.final_t);
        if (o.dist_vs)
            set(p + ".dist_Vs", *o.dist_vs);
        if (o.dist_vg)
            set(p + ".dist_Vg", *o.dist_vg);
        if (o.dist_vb)
            set(p + ".dist_Vb", *o.dist_vb);
    }

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    void write(std::ostream& os) const
    {
        for (const auto& [k, v] : entries_)
            os << k << " = " << v << "\n";
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

} // namespace strip::io
