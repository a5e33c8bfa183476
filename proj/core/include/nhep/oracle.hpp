// Multiplier-form reference dynamics: the unreduced equations with the
// Lagrange multipliers solved on line from the time-differentiated
// constraints. Kept independent of the quasivelocity path so trajectory
// comparisons adjudicate both implementations.
#pragma once

#include "nhep/liealg.hpp"
#include "nhep/linalg.hpp"
#include "nhep/models.hpp"

namespace nhep::oracle {

using linalg::VecX;

/// Pendulum skate in z = (Omega, Y, Gamma) coordinates with constraint
/// covectors psi1 = (E1 x Gamma, 0), psi2 = (0, Gamma), psi3 = (0, E1 x Gamma).
class SkateOracle {
public:
    explicit SkateOracle(const models::SkateParams& params);

    /// Multipliers making the constraint time-derivatives vanish at z.
    Vec3 multipliers(const models::FullState& z) const;

    /// max_a |<psi^a(Gamma), (Omega, Y)>|.
    double constraint_residual(const models::FullState& z) const;

    /// Right-hand side of the 9-dimensional flow (Omega, Y, Gamma).
    VecX rhs(const VecX& z) const;

    static VecX pack(const models::FullState& z);
    static models::FullState unpack(const VecX& z);

private:
    models::SkateParams params_;
    linalg::Lu mass_;  // factorization of the constant 6x6 kinetic matrix
};

/// Veselova system in z = (Omega, Gamma) coordinates, single multiplier.
class VeselovaOracle {
public:
    explicit VeselovaOracle(const models::VeselovaParams& params);

    double multiplier(const Vec3& omega, const Vec3& gamma) const;
    VecX rhs(const VecX& z) const;  // 6-dimensional

private:
    models::VeselovaParams params_;
};

}  // namespace nhep::oracle
