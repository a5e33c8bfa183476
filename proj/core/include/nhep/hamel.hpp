// Advected-parameter-dependent Hamel frames and the generic reduced dynamics
// they induce: structure-constant and frame-curvature tensors, the momentum
// right-hand side, acceleration solves and the constrained energy.
#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "nhep/liealg.hpp"
#include "nhep/linalg.hpp"

namespace nhep::hamel {

using linalg::MatX;
using linalg::VecX;

/// Frame matrix E(Gamma) is not invertible to tolerance.
struct SingularFrameError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Constrained mass-matrix block is not positive definite.
struct NotPositiveDefiniteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Reciprocal-condition threshold below which a frame counts as singular.
inline constexpr double kFrameRcondTol = 1e-10;

/// Gamma-dependent basis of the Lie algebra. Columns 0..n_free-1 span the
/// constrained subspace d(Gamma); columns n_free..n-1 its complement.
struct HamelFrame {
    int n = 0;
    int n_free = 0;
    std::function<MatX(const Vec3&)> basis;              // Gamma -> n x n
    std::function<MatX(const Vec3&, int)> dbasis;        // (Gamma, j) -> dE/dGamma_j
};

/// A reduced mechanical system l(xi, Gamma) = 1/2 xi^T G_body xi - U(Gamma)
/// together with the algebra hooks that close the equations of motion.
struct ReducedSystem {
    HamelFrame frame;
    MatX G_body;                                            // constant n x n, symmetric
    std::function<double(const Vec3&)> potential;           // U(Gamma)
    std::function<Vec3(const Vec3&)> dpotential;            // dU/dGamma
    std::function<VecX(const VecX&, const VecX&)> bracket;  // Lie bracket, standard coords
    std::function<VecX(const Vec3&, const Vec3&)> momentum_K;  // K(y, Gamma) in s*
    std::function<Vec3(const VecX&, const Vec3&)> advect;      // xi Gamma
};

/// Dense rank-3 array used for the frame tensors (test/diagnostic surface;
/// the integration path works with contractions and never materializes it).
class Tensor3 {
public:
    Tensor3() = default;
    Tensor3(int d0, int d1, int d2)
        : d0_(d0), d1_(d1), d2_(d2),
          a_(static_cast<size_t>(d0) * static_cast<size_t>(d1) * static_cast<size_t>(d2), 0.0) {}

    int dim0() const { return d0_; }
    int dim1() const { return d1_; }
    int dim2() const { return d2_; }
    double operator()(int i, int j, int k) const { return a_[idx(i, j, k)]; }
    double& operator()(int i, int j, int k) { return a_[idx(i, j, k)]; }

private:
    size_t idx(int i, int j, int k) const {
        return (static_cast<size_t>(i) * static_cast<size_t>(d1_) + static_cast<size_t>(j)) *
                   static_cast<size_t>(d2_) +
               static_cast<size_t>(k);
    }
    int d0_ = 0, d1_ = 0, d2_ = 0;
    std::vector<double> a_;
};

/// Everything the momentum-form dynamics needs at a fixed Gamma.
struct ReducedTensors {
    Tensor3 C;     // C^k_{ab}: [E_a, E_b] = C^k_{ab} E_k, k over n, a/b over n_free
    Tensor3 F;     // frame-curvature tensor F^i_{ab}
    Tensor3 B;     // B = C + F entrywise
    MatX G;        // G(Gamma) = E^T G_body E
    MatX varkappa; // 3 x n_free, column b = xi Gamma for xi = E_b
    VecX K_term;   // <K(dl/dGamma|c, Gamma), E_a>, a over n_free
};

/// Structure constants of the frame: C^k_{ab} with [E_a, E_b] = C^k_{ab} E_k.
Tensor3 structure_constants(const ReducedSystem& sys, const Vec3& gamma);

/// Frame-curvature tensor: D E_a(Gamma) (E_b Gamma) = F^i_{ab} E_i.
Tensor3 curvature_F(const ReducedSystem& sys, const Vec3& gamma);

/// Assemble all tensors at once.
ReducedTensors reduced_tensors(const ReducedSystem& sys, const Vec3& gamma);

/// Full momentum vector p_i = <mu, E_i> for the constrained velocity v.
VecX momentum(const ReducedSystem& sys, const VecX& v, const Vec3& gamma);

struct ReducedRhs {
    VecX p_dot;      // n_free momentum rates
    Vec3 gamma_dot;  // advected-vector rate
};

/// Momentum-form right-hand side:
///   dp_a/dt = <mu, [xi, E_a]> - <mu, D E_a (xi Gamma)> + <K(dl/dGamma|c, Gamma), E_a>
///   dGamma/dt = -(xi Gamma)
ReducedRhs reduced_rhs(const ReducedSystem& sys, const VecX& v, const Vec3& gamma);

/// Invert p_a = G_{ab}(Gamma) v^b for the accelerations, accounting for the
/// Gamma-dependence of G through the analytic frame derivative.
VecX solve_accelerations(const ReducedSystem& sys, const VecX& v, const Vec3& gamma,
                         const VecX& p_dot);

/// Constrained energy 1/2 G_{ab} v^a v^b + U(Gamma).
double constrained_energy(const ReducedSystem& sys, const VecX& v, const Vec3& gamma);

/// Packed first-order RHS for the state y = [v(0..n_free-1); Gamma(3)],
/// for driving a generic system through a time integrator.
VecX state_rhs(const ReducedSystem& sys, const VecX& y);

}  // namespace nhep::hamel
