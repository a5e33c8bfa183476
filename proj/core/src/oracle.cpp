#include "nhep/oracle.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace nhep::oracle {

namespace {

using models::FullState;

struct SkateForces {
    VecX f;                           // momentum rates without multiplier forces
    std::array<VecX, 3> psi;          // constraint covectors as 6-vectors
    std::array<double, 3> psidot_xi;  // <dpsi^a/dt, xi>
};

SkateForces assemble(const models::SkateParams& p, const linalg::MatX& mass,
                     const FullState& z) {
    const VecX xi = to_vec6(Se3Element{z.Omega, z.Y});
    const VecX mom = mass * xi;
    const Vec3 Pi{mom[0], mom[1], mom[2]};
    const Vec3 P{mom[3], mom[4], mom[5]};

    // d/dt (dl/dxi) = ad*_xi (dl/dxi) + K(dl/dGamma, Gamma) + lambda_a psi^a
    const Se3Covector coad = se3_coad(Se3Element{z.Omega, z.Y}, Se3Covector{Pi, P});
    const Vec3 dld_gamma = {0.0, 0.0, -p.m * p.g * p.l};
    const Se3Covector grav = momentum_K(dld_gamma, z.Gamma);

    SkateForces out;
    out.f = to_vec6(Se3Covector{coad.pi + grav.pi, coad.p + grav.p});

    const Vec3 e1xg = kE1.cross(z.Gamma);
    out.psi[0] = to_vec6(Se3Covector{e1xg, Vec3{}});
    out.psi[1] = to_vec6(Se3Covector{Vec3{}, z.Gamma});
    out.psi[2] = to_vec6(Se3Covector{Vec3{}, e1xg});

    // hand-differentiated covectors along dGamma/dt = Gamma x Omega
    const Vec3 gdot = z.Gamma.cross(z.Omega);
    const Vec3 e1xgdot = kE1.cross(gdot);
    out.psidot_xi[0] = e1xgdot.dot(z.Omega);
    out.psidot_xi[1] = gdot.dot(z.Y);
    out.psidot_xi[2] = e1xgdot.dot(z.Y);
    return out;
}

Vec3 solve_multipliers(const linalg::Lu& mass, const SkateForces& w) {
    // Gramian of the constraint covectors in the inverse-mass metric:
    //   [psi^a M^{-1} psi^b] lambda_b = -psi^a M^{-1} f - <dpsi^a/dt, xi>
    std::array<VecX, 3> minv_psi;
    for (size_t a = 0; a < 3; ++a) minv_psi[a] = mass.solve(w.psi[a]);
    const VecX minv_f = mass.solve(w.f);

    linalg::MatX gram(3, 3);
    VecX rhs(3);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b)
            gram(a, b) = w.psi[static_cast<size_t>(a)].dot(minv_psi[static_cast<size_t>(b)]);
        rhs[a] = -w.psi[static_cast<size_t>(a)].dot(minv_f) -
                 w.psidot_xi[static_cast<size_t>(a)];
    }
    VecX lambda(3);
    if (!linalg::solve_spd(gram, rhs, lambda))
        throw std::runtime_error("constraint Gramian not positive definite (|Gamma| = 0?)");
    return {lambda[0], lambda[1], lambda[2]};
}

}  // namespace

SkateOracle::SkateOracle(const models::SkateParams& params)
    : params_(params), mass_(models::skate_body_metric(params)) {
    if (mass_.singular()) throw std::runtime_error("skate kinetic matrix singular");
}

VecX SkateOracle::pack(const FullState& z) {
    return {z.Omega.x, z.Omega.y, z.Omega.z, z.Y.x, z.Y.y,
            z.Y.z,     z.Gamma.x, z.Gamma.y, z.Gamma.z};
}

FullState SkateOracle::unpack(const VecX& z) {
    assert(z.size() == 9);
    return {{z[0], z[1], z[2]}, {z[3], z[4], z[5]}, {z[6], z[7], z[8]}};
}

double SkateOracle::constraint_residual(const FullState& z) const {
    const Vec3 e1xg = kE1.cross(z.Gamma);
    return std::max({std::fabs(e1xg.dot(z.Omega)), std::fabs(z.Gamma.dot(z.Y)),
                     std::fabs(e1xg.dot(z.Y))});
}

Vec3 SkateOracle::multipliers(const FullState& z) const {
    return solve_multipliers(mass_, assemble(params_, models::skate_body_metric(params_), z));
}

VecX SkateOracle::rhs(const VecX& zflat) const {
    const FullState z = unpack(zflat);
    const SkateForces w = assemble(params_, models::skate_body_metric(params_), z);
    const Vec3 lambda = solve_multipliers(mass_, w);

    VecX force = w.f;
    for (int a = 0; a < 3; ++a) force += lambda[a] * w.psi[static_cast<size_t>(a)];
    const VecX xidot = mass_.solve(force);

    const Vec3 gdot = z.Gamma.cross(z.Omega);
    VecX out(9);
    for (int i = 0; i < 6; ++i) out[i] = xidot[i];
    out[6] = gdot.x;
    out[7] = gdot.y;
    out[8] = gdot.z;
    return out;
}

VeselovaOracle::VeselovaOracle(const models::VeselovaParams& params) : params_(params) {}

double VeselovaOracle::multiplier(const Vec3& omega, const Vec3& gamma) const {
    const Vec3 inertia{params_.I1, params_.I2, params_.I3};
    const Vec3 mom{inertia.x * omega.x, inertia.y * omega.y, inertia.z * omega.z};
    const Vec3 du = params_.dpotential ? params_.dpotential(gamma) : Vec3{};
    const Vec3 f = mom.cross(omega) + (-du).cross(gamma);
    const Vec3 minv_f{f.x / inertia.x, f.y / inertia.y, f.z / inertia.z};
    const Vec3 minv_g{gamma.x / inertia.x, gamma.y / inertia.y, gamma.z / inertia.z};
    const double denom = gamma.dot(minv_g);
    if (denom <= 0.0) throw std::runtime_error("Veselova multiplier undefined at Gamma = 0");
    return -gamma.dot(minv_f) / denom;
}

VecX VeselovaOracle::rhs(const VecX& z) const {
    assert(z.size() == 6);
    const Vec3 omega{z[0], z[1], z[2]};
    const Vec3 gamma{z[3], z[4], z[5]};
    const Vec3 inertia{params_.I1, params_.I2, params_.I3};
    const Vec3 mom{inertia.x * omega.x, inertia.y * omega.y, inertia.z * omega.z};
    const Vec3 du = params_.dpotential ? params_.dpotential(gamma) : Vec3{};
    const double lambda = multiplier(omega, gamma);
    const Vec3 f = mom.cross(omega) + (-du).cross(gamma) + lambda * gamma;
    const Vec3 omega_dot{f.x / inertia.x, f.y / inertia.y, f.z / inertia.z};
    const Vec3 gdot = gamma.cross(omega);
    return {omega_dot.x, omega_dot.y, omega_dot.z, gdot.x, gdot.y, gdot.z};
}

}  // namespace nhep::oracle
