// Kinetic-shaping control for the rotor-carrying skate: matching data, the
// rotor feedback law, the shaped (tilde) system it matches, and the direct
// closed-loop dynamics used to verify the equivalence.
#pragma once

#include <array>
#include <functional>

#include "nhep/hamel.hpp"
#include "nhep/models.hpp"

namespace nhep::control {

using linalg::MatX;
using linalg::VecX;
using models::ReducedState;
using models::RotorParams;

/// tau, sigma, rho of the shaped kinetic energy, plus the frame-transported
/// coupling row T(Gamma) = tau E(Gamma). Constructed so both matching
/// conditions hold identically.
struct MatchingData {
    MatX tau;    // s x n
    MatX sigma;  // s x s
    MatX rho;    // s x s
    std::function<MatX(const Vec3&)> T;  // Gamma -> s x n
};

/// Matched family for the single-rotor skate (s = 1):
///   tau = -(J1/sigma) e1^T,  rho = J1 / (1 - J1/sigma).
/// Throws std::invalid_argument when sigma == 0 or sigma == J1.
MatchingData matching_from_sigma(const RotorParams& p);

/// Max residual of the two matching conditions
///   tau^a_i + sigma^{ab} G_{bi} = 0  and  sigma^{ab} + rho^{ab} - G^{ab} = 0.
double matching_residual(const MatchingData& m, const models::RotorMassMatrix& mm);

/// Generic rotor torque u_a = G_ab (T^b_i F^i_{cd} v^c v^d - T^b_c vdot^c),
/// given the accelerations of the matched flow.
VecX control_law_generic(const hamel::ReducedSystem& sys, const MatchingData& m,
                         const models::RotorMassMatrix& mm, const VecX& v,
                         const Vec3& gamma, const VecX& v_dot);

/// Skate specialization u = (J1^2/sigma) vdot1, with the acceleration
/// eliminated through the matched closed-form field, so the law is a pure
/// state feedback.
double control_law_skate(const RotorParams& p, const ReducedState& z);

/// Shaped inertia diag(I1 + J1^2/sigma, I2 + J2, I3 + J3). The first entry
/// may be negative; it parameterizes the matched Lagrangian, not a body.
std::array<double, 3> tilde_inertia(const RotorParams& p);

/// Skate parameters of the matched system (total mass, shaped inertia).
models::SkateParams tilde_params(const RotorParams& p);

/// Conserved rotor momentum of the matched system:
///   pi_tilde = J1 v1 + rho theta_dot,  rho = J1 / (1 - J1/sigma).
double pi_tilde(const RotorParams& p, double v1, double theta_dot);

/// Rotor rate that puts the matched momentum at zero: (J1/sigma - 1) v1.
double theta_dot_for_zero_pi_tilde(const RotorParams& p, double v1);

struct RotorState {
    ReducedState zeta;
    double theta_dot = 0.0;
};

/// Rotor-carrying skate dynamics with the system assembled once up front;
/// use this form inside integration loops.
class RotorDynamics {
public:
    explicit RotorDynamics(const RotorParams& p);

    /// Prescribed torque u; solves the coupled 4x4 system for
    /// (vdot1, vdot2, vdot3, theta_ddot).
    RotorState open_loop_rhs(const RotorState& s, double u) const;

    /// Closed loop under control_law_skate.
    RotorState closed_loop_rhs(const RotorState& s) const;

    const RotorParams& params() const { return p_; }

private:
    RotorParams p_;
    hamel::ReducedSystem sys_;
    models::RotorMassMatrix mm_;
    models::SkateParams tilde_;
};

/// Convenience wrappers over a freshly assembled RotorDynamics.
RotorState rotor_open_loop_rhs(const RotorParams& p, const RotorState& s, double u);
RotorState closed_loop_rhs(const RotorParams& p, const RotorState& s);

/// Total mechanical energy of the rotor-carrying skate.
double rotor_energy(const RotorParams& p, const RotorState& s);

}  // namespace nhep::control
