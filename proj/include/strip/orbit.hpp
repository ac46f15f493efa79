#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "strip/errors.hpp"
#include "strip/reaction.hpp"

namespace strip {

/// Phase-plane state (v, v').
using PhaseState = std::array<double, 2>;

struct OrbitTolerances {
    double abs = 1e-12;
    double rel = 1e-10;
    double first_step = 1e-3;
};

/// Where to stop an outer-orbit integration.
struct StopCondition {
    enum class Kind { Value, Turning };
    Kind kind = Kind::Value;
    double level = 0.0; ///< target v for Kind::Value
    /// +1: the monitored quantity (v - level, or w for Turning) crosses upward;
    /// -1: downward.
    int direction = -1;

    static StopCondition value_falling(double level) { return {Kind::Value, level, -1}; }
    static StopCondition value_rising(double level) { return {Kind::Value, level, +1}; }
    /// Maximum of v (w crosses 0 downward).
    static StopCondition peak() { return {Kind::Turning, 0.0, -1}; }
    /// Minimum of v (w crosses 0 upward).
    static StopCondition trough() { return {Kind::Turning, 0.0, +1}; }
};

/// Integrates v'' = -f_l(v) from a fixed start state with an embedded 5(4)
/// Dormand-Prince pair and locates stop events on the dense output.
class OuterOrbit {
public:
    struct Hit {
        double s = 0.0;
        PhaseState state{};
    };

    OuterOrbit(double alpha, PhaseState start, OrbitTolerances tol = {})
        : alpha_(alpha), start_(start), tol_(tol)
    {
    }

    const PhaseState& start() const noexcept { return start_; }

    /// First event matching `stop` with s > 0.
    Hit run_until(const StopCondition& stop, double s_max = 1e4, double v_bound = 10.0) const
    {
        auto stepper = make_stepper();
        PhaseState y = start_;
        stepper.initialize(y, 0.0, tol_.first_step);
        double g_prev = monitor(stop, start_);
        double s_prev = 0.0;
        while (stepper.current_time() < s_max) {
            stepper.do_step(field());
            const double s_now = stepper.current_time();
            const PhaseState& y_now = stepper.current_state();
            if (!std::isfinite(y_now[0]) || std::abs(y_now[0]) > v_bound)
                throw NumericalError("outer orbit integration blew up at s = " + std::to_string(s_now));
            const double g_now = monitor(stop, y_now);
            if (crossed(stop, g_prev, g_now))
                return locate(stepper, stop, s_prev, s_now);
            g_prev = g_now;
            s_prev = s_now;
        }
        throw NumericalError("outer orbit did not reach its stop event before s = " + std::to_string(s_max));
    }

    /// States at the requested parameters (ascending, all >= 0).
    std::vector<PhaseState> sample(std::span<const double> s_values) const
    {
        std::vector<PhaseState> out;
        out.reserve(s_values.size());
        if (s_values.empty())
            return out;
        auto stepper = make_stepper();
        PhaseState y = start_;
        stepper.initialize(y, 0.0, tol_.first_step);
        std::size_t k = 0;
        while (k < s_values.size() && s_values[k] <= 0.0) {
            out.push_back(start_);
            ++k;
        }
        while (k < s_values.size()) {
            stepper.do_step(field());
            const double s_now = stepper.current_time();
            if (!std::isfinite(stepper.current_state()[0]))
                throw NumericalError("outer orbit sampling produced a non-finite state");
            while (k < s_values.size() && s_values[k] <= s_now) {
                PhaseState yk{};
                stepper.calc_state(s_values[k], yk);
                out.push_back(yk);
                ++k;
            }
        }
        return out;
    }

    /// First integral 0.5 w^2 + F(v).
    double energy(const PhaseState& y) const { return 0.5 * y[1] * y[1] + outer_potential(alpha_, y[0]); }

private:
    struct Field {
        double alpha;
        void operator()(const PhaseState& y, PhaseState& dy, double /*s*/) const
        {
            dy[0] = y[1];
            dy[1] = -bistable(alpha, y[0]);
        }
    };

    Field field() const { return Field{alpha_}; }

    using Stepper = boost::numeric::odeint::result_of::make_dense_output<
        boost::numeric::odeint::runge_kutta_dopri5<PhaseState>>::type;

    Stepper make_stepper() const
    {
        namespace ode = boost::numeric::odeint;
        return ode::make_dense_output(tol_.abs, tol_.rel, ode::runge_kutta_dopri5<PhaseState>());
    }

    static double monitor(const StopCondition& stop, const PhaseState& y)
    {
        return stop.kind == StopCondition::Kind::Value ? y[0] - stop.level : y[1];
    }

    static bool crossed(const StopCondition& stop, double g_prev, double g_now)
    {
        if (stop.direction > 0)
            return g_prev < 0.0 && g_now >= 0.0;
        return g_prev > 0.0 && g_now <= 0.0;
    }

    Hit locate(Stepper& stepper, const StopCondition& stop, double lo, double hi) const
    {
        PhaseState y{};
        auto g_at = [&](double s) {
            stepper.calc_state(s, y);
            return monitor(stop, y);
        };
        double g_lo = g_at(lo);
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi)
                break;
            const double gm = g_at(mid);
            if ((gm < 0.0) == (g_lo < 0.0) && gm != 0.0) {
                lo = mid;
                g_lo = gm;
            } else {
                hi = mid;
            }
        }
        Hit hit;
        hit.s = hi;
        stepper.calc_state(hi, hit.state);
        if (stop.kind == StopCondition::Kind::Value)
            hit.state[0] = stop.level;
        else
            hit.state[1] = 0.0;
        return hit;
    }

    double alpha_;
    PhaseState start_;
    OrbitTolerances tol_;
};

} // namespace strip
