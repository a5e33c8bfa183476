// Concrete systems: the pendulum skate (with and without an internal rotor)
// on se(3) and the Veselova rigid body on so(3). Each exposes a generic
// ReducedSystem plus, for the skate, closed-form fast paths and invariants.
#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>

#include "nhep/hamel.hpp"
#include "nhep/liealg.hpp"

namespace nhep::models {

using hamel::HamelFrame;
using hamel::ReducedSystem;
using linalg::MatX;
using linalg::VecX;

/// Pendulum skate: total mass m [kg], pendulum length l [m], gravity g
/// [m/s^2], principal body inertias I1..I3 [kg m^2].
struct SkateParams {
    double m = 2.0;
    double l = 0.8;
    double g = 9.8;
    double I1 = 0.35;
    double I2 = 0.35;
    double I3 = 0.004;

    double I1_bar() const { return I1 + m * l * l; }
    double I2_bar() const { return I2 + m * l * l; }
};

/// Physical-range validation for user-supplied parameters (shaped inertias
/// produced by the matching control are exempt and may violate these).
bool validate_physical(const SkateParams& p, std::string* why = nullptr);

/// Skate with an internal rotor on the blade axis. `base.m` is the total
/// mass including the rotor; J1..J3 are the rotor inertias; sigma is the
/// kinetic-shaping gain [kg m^2].
struct RotorParams {
    SkateParams base;
    double J1 = 0.005;
    double J2 = 0.0025;
    double J3 = 0.0025;
    double sigma = -1e-5;
};

bool validate_physical(const RotorParams& p, std::string* why = nullptr);

/// Reduced skate state zeta = (v1, v2, v3, Gamma2, Gamma3). Pitch constancy
/// Gamma1 = 0 is built into the layout, not stored.
struct ReducedState {
    double v1 = 0.0;  // blade-axis angular rate [rad/s]
    double v2 = 0.0;  // vertical-axis angular rate [rad/s]
    double v3 = 0.0;  // blade-axis slide speed [m/s]
    double G2 = 0.0;
    double G3 = 1.0;

    std::array<double, 5> to_array() const { return {v1, v2, v3, G2, G3}; }
    static ReducedState from_array(const std::array<double, 5>& a) {
        return {a[0], a[1], a[2], a[3], a[4]};
    }
};

/// Unreduced view z = (Omega, Y, Gamma).
struct FullState {
    Vec3 Omega;
    Vec3 Y;
    Vec3 Gamma;
};

// --- Pendulum skate -------------------------------------------------------

/// The Gamma-dependent orthonormal frame of se(3) adapted to the skate
/// constraints (columns 1..3 span the admissible subspace).
HamelFrame skate_frame();

/// Kinetic-energy matrix of the skate Lagrangian on se(3), standard basis.
MatX skate_body_metric(const SkateParams& p);

ReducedSystem skate_system(const SkateParams& p);

/// Closed-form reduced vector field; returns dzeta/dt in state layout.
ReducedState skate_vector_field(const SkateParams& p, const ReducedState& z);

struct SkateInvariants {
    double E = 0.0;   // constrained energy
    double C1 = 0.0;  // (I2 G2^2 + I3 G3^2) v2
    double C2 = 0.0;  // l G2 v2 + v3 + l C1 arctan(...) / sqrt(I3 (I2 - I3))
    double C3 = 0.0;  // (G2^2 + G3^2) / 2
};

/// Requires I2 > I3 (C2 is undefined otherwise).
SkateInvariants skate_invariants(const SkateParams& p, const ReducedState& z);

/// Quasivelocity decomposition of a full state; v4..v6 are the constraint
/// pairings and vanish on admissible motion.
struct QuasiVelocities {
    ReducedState zeta;
    double v4 = 0.0, v5 = 0.0, v6 = 0.0;

    double max_residual() const;
    bool constrained(double tol = 1e-6) const { return max_residual() <= tol; }
};

QuasiVelocities quasivelocities_from_full(const FullState& z);
FullState full_from_reduced(const ReducedState& z);

// --- Skate with internal rotor --------------------------------------------

struct RotorMassMatrix {
    MatX G;       // 6x6 block over se(3), with rotor-augmented inertias
    VecX G_ia;    // 6-vector coupling column (J1 on the blade axis)
    double G_ab;  // rotor-rotor block (J1)
};

RotorMassMatrix rotor_mass_matrix(const RotorParams& p);

/// ReducedSystem of the rotor-carrying skate (rotor coupling handled by the
/// control module on top of this).
ReducedSystem rotor_skate_system(const RotorParams& p);

// --- Veselova system -------------------------------------------------------

struct VeselovaParams {
    double I1 = 1.0;
    double I2 = 1.2;
    double I3 = 1.5;
    std::function<double(const Vec3&)> potential;   // U(Gamma); null => 0
    std::function<Vec3(const Vec3&)> dpotential;    // null => 0
};

/// so(3) system with constraint Gamma . Omega = 0 (n = 3, r = 1).
/// The frame is Gram-Schmidt seeded from e1, switching to e2 when
/// |Gamma . e1| > 0.9 |Gamma|; trajectories must stay within one chart.
ReducedSystem veselova_system(const VeselovaParams& p);

}  // namespace nhep::models
