// Fixed-step RK4 (default) and embedded Dormand-Prince RK45 time stepping
// with scalar monitors, sign-crossing event location and drift reporting.
#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nhep/linalg.hpp"

namespace nhep::sim {

using linalg::VecX;

struct NonFiniteStateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Rhs = std::function<VecX(double, const VecX&)>;

/// Read-only scalar sampled along the trajectory.
struct Monitor {
    std::string name;
    std::function<double(double, const VecX&)> eval;
};

enum class Method { kRk4, kRk45 };

struct IntegratorConfig {
    Method method = Method::kRk4;
    double dt = 1e-4;    // fixed step for RK4, initial step for RK45
    double t_end = 1.0;
    double abs_tol = 1e-10;  // RK45 only
    double rel_tol = 1e-10;  // RK45 only
    std::function<double(double, const VecX&)> event;  // stop when this crosses zero
    std::vector<Monitor> monitors;
    int store_every = 1;  // sample stride for stored states/monitors
};

struct Trajectory {
    std::vector<double> times;
    std::vector<VecX> states;
    std::vector<std::vector<double>> monitor_values;  // [monitor][sample]
    std::optional<double> event_time;
    std::optional<VecX> event_state;
};

/// Integrate dy/dt = rhs(t, y) from y0 over [0, t_end]. The event function,
/// when set, is evaluated at step endpoints; a sign change is refined by
/// bisection (restepping from the left bracket) to 1e-12 s and terminates
/// the run. Throws NonFiniteStateError when the state leaves R^n.
Trajectory integrate(const Rhs& rhs, const VecX& y0, const IntegratorConfig& config);

/// One classical RK4 step.
VecX rk4_step(const Rhs& rhs, double t, const VecX& y, double h);

struct DriftReport {
    std::vector<std::string> names;
    std::vector<double> initial;
    std::vector<double> max_abs_drift;
    std::vector<double> max_rel_drift;  // abs drift / |initial|, 0 when initial == 0

    double worst_abs() const;
    double worst_rel() const;
};

/// Max |I_k(t) - I_k(0)| over the stored samples for each evaluator.
DriftReport drift_report(const Trajectory& traj, const std::vector<Monitor>& invariants);

}  // namespace nhep::sim
