// Equilibrium characterization, linearization, and the energy-Casimir
// stability certificate for the skate equilibria (uncontrolled and shaped).
#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "nhep/linalg.hpp"
#include "nhep/models.hpp"

namespace nhep::analysis {

using linalg::MatX;
using linalg::VecX;
using models::ReducedState;
using models::RotorParams;
using models::SkateParams;

using ScalarField = std::function<double(const VecX&)>;
using VectorField = std::function<VecX(const VecX&)>;

/// Central-difference Jacobian, step 1e-6 * max(1, |x|_inf).
MatX jacobian(const VectorField& f, const VecX& x);

/// Central-difference gradient and Hessian of a scalar field.
VecX fd_gradient(const ScalarField& f, const VecX& x);
MatX fd_hessian(const ScalarField& f, const VecX& x);

/// Eigenvalues of a real square matrix (Hessenberg + shifted QR).
std::vector<std::complex<double>> eigenvalues(const MatX& a);

/// Deviation of zeta from the equilibrium conditions
///   v1 = 0 and ((I2_bar - I3) G3 v2^2 + mgl) G2 + ml G3 v2 v3 = 0,
/// cross-checked against |f(zeta)|_inf.
double equilibrium_residual(const SkateParams& p, const ReducedState& z);

enum class EquilibriumKind { kSliding, kSpinning, kOther };

struct EquilibriumReport {
    ReducedState zeta_eq;
    double residual = 0.0;  // <= 1e-10 for a state reported as an equilibrium
    EquilibriumKind kind = EquilibriumKind::kOther;
};

/// Residual plus a tag for the upright families (sliding: only v3 free,
/// spinning: only v2 free, both at Gamma = e3).
EquilibriumReport classify_equilibrium(const SkateParams& p, const ReducedState& z);

/// Conserved quantities as scalar fields over zeta in R^5.
struct InvariantSet {
    ScalarField energy;
    std::vector<ScalarField> casimirs;
};

InvariantSet skate_invariant_set(const SkateParams& p);

enum class LinearVerdict { kUnstable, kInconclusive };
enum class EcVerdict { kStable, kIndefinite, kInconclusive };

struct StabilityCertificate {
    std::vector<std::complex<double>> eigenvalues;
    LinearVerdict linear_verdict = LinearVerdict::kInconclusive;
    VecX multipliers;
    MatX nullspace_basis;       // columns span the constraint tangent space
    MatX restricted_hessian;    // Hessian projected onto that basis
    std::vector<double> restricted_eigs;
    EcVerdict ec_verdict = EcVerdict::kInconclusive;
};

struct StationarityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DependentGradientsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Energy-Casimir test at zeta_eq with multipliers c: verifies first-order
/// stationarity of E + sum c_j C_j (throws StationarityError otherwise),
/// projects its Hessian onto the common tangent space of the casimirs and
/// classifies definiteness with margin 1e-10.
StabilityCertificate energy_casimir_certificate(const InvariantSet& inv,
                                                const VecX& zeta_eq, const VecX& c);

/// Least-squares multipliers solving D(E + sum c_j C_j)(zeta_eq) = 0; the
/// closed-form presets remain authoritative where the theory supplies them.
VecX stationarity_multipliers(const InvariantSet& inv, const VecX& zeta_eq);

/// Eigenvalues-and-certificate bundle for dzeta/dt = f(zeta) at zeta_eq.
StabilityCertificate analyze_equilibrium(const VectorField& f, const InvariantSet& inv,
                                         const VecX& zeta_eq, const VecX& c);

/// Closed-form multiplier presets for the upright equilibria.
VecX sliding_multipliers(const SkateParams& p, double y0);    // (0, -m Y0, -mgl)
VecX spinning_multipliers(const SkateParams& p, double w0);   // (-W0, 0, I3 W0^2 - mgl)

/// Spin rate above which the upright spinning motion is certified stable:
/// sqrt(mgl / (I3 + ml^2 - I2)). Throws std::domain_error when
/// I3 + ml^2 <= I2 (spinning is then unstable for every rate).
double spinning_threshold(const SkateParams& p);

/// Lower end of the stabilizing gain window: -J1^2 / (I1 + ml^2); the
/// certified window is (bound, 0).
double sigma_stability_bound(const RotorParams& p);

}  // namespace nhep::analysis
