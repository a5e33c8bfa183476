#include "nhep/sim.hpp"

#include <algorithm>
#include <cmath>

namespace nhep::sim {

namespace {

bool finite(const VecX& y) {
    for (int i = 0; i < y.size(); ++i)
        if (!std::isfinite(y[i])) return false;
    return true;
}

void require_finite(const VecX& y, double t) {
    if (!finite(y))
        throw NonFiniteStateError("non-finite state at t = " + std::to_string(t));
}

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

struct Dp45Result {
    VecX y;
    double err = 0.0;  // scaled error estimate
};

Dp45Result dp45_step(const Rhs& rhs, double t, const VecX& y, double h, double atol,
                     double rtol) {
    const VecX k1 = rhs(t, y);
    const VecX k2 = rhs(t + h / 5.0, y + (h * kA21) * k1);
    const VecX k3 = rhs(t + 3.0 * h / 10.0, y + (h * kA31) * k1 + (h * kA32) * k2);
    const VecX k4 = rhs(t + 4.0 * h / 5.0,
                        y + (h * kA41) * k1 + (h * kA42) * k2 + (h * kA43) * k3);
    const VecX k5 = rhs(t + 8.0 * h / 9.0, y + (h * kA51) * k1 + (h * kA52) * k2 +
                                               (h * kA53) * k3 + (h * kA54) * k4);
    const VecX k6 = rhs(t + h, y + (h * kA61) * k1 + (h * kA62) * k2 + (h * kA63) * k3 +
                                    (h * kA64) * k4 + (h * kA65) * k5);
    Dp45Result out;
    out.y = y + (h * kB1) * k1 + (h * kB3) * k3 + (h * kB4) * k4 + (h * kB5) * k5 +
            (h * kB6) * k6;
    const VecX k7 = rhs(t + h, out.y);
    const VecX e = (h * kE1) * k1 + (h * kE3) * k3 + (h * kE4) * k4 + (h * kE5) * k5 +
                   (h * kE6) * k6 + (h * kE7) * k7;
    double err = 0.0;
    for (int i = 0; i < y.size(); ++i) {
        const double sc = atol + rtol * std::max(std::fabs(y[i]), std::fabs(out.y[i]));
        err = std::max(err, std::fabs(e[i]) / sc);
    }
    out.err = err;
    return out;
}

}  // namespace

VecX rk4_step(const Rhs& rhs, double t, const VecX& y, double h) {
    const VecX k1 = rhs(t, y);
    const VecX k2 = rhs(t + 0.5 * h, y + (0.5 * h) * k1);
    const VecX k3 = rhs(t + 0.5 * h, y + (0.5 * h) * k2);
    const VecX k4 = rhs(t + h, y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory integrate(const Rhs& rhs, const VecX& y0, const IntegratorConfig& config) {
    Trajectory traj;
    traj.monitor_values.resize(config.monitors.size());

    auto sample = [&](double t, const VecX& y) {
        traj.times.push_back(t);
        traj.states.push_back(y);
        for (size_t m = 0; m < config.monitors.size(); ++m)
            traj.monitor_values[m].push_back(config.monitors[m].eval(t, y));
    };

    require_finite(y0, 0.0);
    double t = 0.0;
    VecX y = y0;
    sample(t, y);

    double e_prev = config.event ? config.event(t, y) : 0.0;
    long step_index = 0;
    double h = config.dt;

    auto handle_event = [&](double t0, const VecX& ys) -> bool {
        // bisection on the step size, restepping from the left bracket
        double lo = 0.0, hi = t - t0;
        VecX y_hi = y;
        while (hi - lo > 1e-12) {
            const double mid = 0.5 * (lo + hi);
            const VecX ym = rk4_step(rhs, t0, ys, mid);
            const double em = config.event(t0 + mid, ym);
            if ((e_prev > 0.0 && em <= 0.0) || (e_prev < 0.0 && em >= 0.0)) {
                hi = mid;
                y_hi = ym;
            } else {
                lo = mid;
            }
        }
        traj.event_time = t0 + hi;
        traj.event_state = y_hi;
        sample(*traj.event_time, y_hi);
        return true;
    };

    if (config.method == Method::kRk4) {
        long n_steps = static_cast<long>(std::floor(config.t_end / config.dt + 1e-9));
        double tail = config.t_end - config.dt * static_cast<double>(n_steps);
        if (tail < 1e-12 * std::max(1.0, config.t_end)) tail = 0.0;
        const long n_total = n_steps + (tail > 0.0 ? 1 : 0);
        for (long k = 0; k < n_total; ++k) {
            const bool last = (k + 1 == n_total);
            const double step = (last && tail > 0.0) ? tail : config.dt;
            const double t0 = t;
            const VecX ys = y;
            y = rk4_step(rhs, t0, y, step);
            t = last ? config.t_end : config.dt * static_cast<double>(k + 1);
            require_finite(y, t);
            if (config.event) {
                const double e_now = config.event(t, y);
                if ((e_prev > 0.0 && e_now <= 0.0) || (e_prev < 0.0 && e_now >= 0.0)) {
                    handle_event(t0, ys);
                    return traj;
                }
                e_prev = e_now;
            }
            if (++step_index % config.store_every == 0 || last) sample(t, y);
        }
        return traj;
    }

    // RK45 with PI-free elementary step control
    while (t < config.t_end) {
        h = std::min(h, config.t_end - t);
        const Dp45Result r = dp45_step(rhs, t, y, h, config.abs_tol, config.rel_tol);
        if (r.err <= 1.0) {
            const double t0 = t;
            const VecX ys = y;
            y = r.y;
            t += h;
            require_finite(y, t);
            if (config.event) {
                const double e_now = config.event(t, y);
                if ((e_prev > 0.0 && e_now <= 0.0) || (e_prev < 0.0 && e_now >= 0.0)) {
                    handle_event(t0, ys);
                    return traj;
                }
                e_prev = e_now;
            }
            if (++step_index % config.store_every == 0 || t >= config.t_end) sample(t, y);
        }
        const double f = (r.err > 0.0) ? 0.9 * std::pow(r.err, -0.2) : 5.0;
        h *= std::clamp(f, 0.2, 5.0);
        if (h < 1e-14)
            throw NonFiniteStateError("RK45 step size underflow at t = " + std::to_string(t));
    }
    return traj;
}

double DriftReport::worst_abs() const {
    double w = 0.0;
    for (double d : max_abs_drift) w = std::max(w, d);
    return w;
}

double DriftReport::worst_rel() const {
    double w = 0.0;
    for (double d : max_rel_drift) w = std::max(w, d);
    return w;
}

DriftReport drift_report(const Trajectory& traj, const std::vector<Monitor>& invariants) {
    DriftReport rep;
    for (const Monitor& inv : invariants) {
        rep.names.push_back(inv.name);
        const double i0 = inv.eval(traj.times.front(), traj.states.front());
        double worst = 0.0;
        for (size_t k = 0; k < traj.times.size(); ++k)
            worst = std::max(worst,
                             std::fabs(inv.eval(traj.times[k], traj.states[k]) - i0));
        rep.initial.push_back(i0);
        rep.max_abs_drift.push_back(worst);
        rep.max_rel_drift.push_back(i0 != 0.0 ? worst / std::fabs(i0) : 0.0);
    }
    return rep;
}

}  // namespace nhep::sim
