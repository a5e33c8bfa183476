#include "nhep/control.hpp"

#include <cmath>
#include <stdexcept>

namespace nhep::control {

namespace {

using hamel::ReducedSystem;

// xi = v1 E1 + v2 Gamma (angular), Y = v3 E1, with Gamma1 = 0.
VecX constrained_xi(const ReducedState& z) {
    return {z.v1, z.v2 * z.G2, z.v2 * z.G3, z.v3, 0.0, 0.0};
}

}  // namespace

MatchingData matching_from_sigma(const RotorParams& p) {
    if (p.sigma == 0.0) throw std::invalid_argument("matching: sigma must be nonzero");
    if (p.sigma == p.J1) throw std::invalid_argument("matching: sigma = J1 makes rho infinite");
    MatchingData m;
    m.tau = MatX(1, 6);
    m.tau(0, 0) = -p.J1 / p.sigma;
    m.sigma = MatX(1, 1);
    m.sigma(0, 0) = p.sigma;
    m.rho = MatX(1, 1);
    m.rho(0, 0) = p.J1 / (1.0 - p.J1 / p.sigma);
    const MatX tau = m.tau;
    m.T = [tau](const Vec3& gamma) {
        const MatX e = models::skate_frame().basis(gamma);
        return tau * e;
    };
    return m;
}

double matching_residual(const MatchingData& m, const models::RotorMassMatrix& mm) {
    const double sigma_inv = 1.0 / m.sigma(0, 0);
    double r = 0.0;
    for (int i = 0; i < 6; ++i)
        r = std::max(r, std::fabs(m.tau(0, i) + sigma_inv * mm.G_ia[i]));
    r = std::max(r, std::fabs(sigma_inv + 1.0 / m.rho(0, 0) - 1.0 / mm.G_ab));
    return r;
}

VecX control_law_generic(const ReducedSystem& sys, const MatchingData& m,
                         const models::RotorMassMatrix& mm, const VecX& v,
                         const Vec3& gamma, const VecX& v_dot) {
    const int nf = sys.frame.n_free;
    const hamel::Tensor3 f = hamel::curvature_F(sys, gamma);
    const MatX t = m.T(gamma);

    VecX u(t.rows());
    for (int a = 0; a < t.rows(); ++a) {
        double quad = 0.0;
        for (int i = 0; i < sys.frame.n; ++i) {
            if (t(a, i) == 0.0) continue;
            for (int c = 0; c < nf; ++c)
                for (int d = 0; d < nf; ++d) quad += t(a, i) * f(i, c, d) * v[c] * v[d];
        }
        double lin = 0.0;
        for (int c = 0; c < nf; ++c) lin += t(a, c) * v_dot[c];
        u[a] = mm.G_ab * (quad - lin);
    }
    return u;
}

double control_law_skate(const RotorParams& p, const ReducedState& z) {
    // u = (J1^2/sigma) vdot1, with vdot1 the matched-flow acceleration; the
    // fixed point of u = (J1^2/sigma) vdot1 against the coupled momentum
    // equations is exactly the shaped-inertia field, so substituting it
    // closes the loop without acceleration feedback.
    const ReducedState f = models::skate_vector_field(tilde_params(p), z);
    return (p.J1 * p.J1 / p.sigma) * f.v1;
}

std::array<double, 3> tilde_inertia(const RotorParams& p) {
    return {p.base.I1 + p.J1 * p.J1 / p.sigma, p.base.I2 + p.J2, p.base.I3 + p.J3};
}

models::SkateParams tilde_params(const RotorParams& p) {
    models::SkateParams t = p.base;
    const std::array<double, 3> ti = tilde_inertia(p);
    t.I1 = ti[0];
    t.I2 = ti[1];
    t.I3 = ti[2];
    return t;
}

double pi_tilde(const RotorParams& p, double v1, double theta_dot) {
    const double rho = p.J1 / (1.0 - p.J1 / p.sigma);
    return p.J1 * v1 + rho * theta_dot;
}

double theta_dot_for_zero_pi_tilde(const RotorParams& p, double v1) {
    return (p.J1 / p.sigma - 1.0) * v1;
}

RotorDynamics::RotorDynamics(const RotorParams& p)
    : p_(p), sys_(models::rotor_skate_system(p)), mm_(models::rotor_mass_matrix(p)),
      tilde_(tilde_params(p)) {}

RotorState RotorDynamics::open_loop_rhs(const RotorState& s, double u) const {
    const ReducedSystem& sys = sys_;
    const models::RotorMassMatrix& mm = mm_;
    const Vec3 gamma{0.0, s.zeta.G2, s.zeta.G3};
    const MatX e = sys.frame.basis(gamma);
    const VecX v{s.zeta.v1, s.zeta.v2, s.zeta.v3};

    const VecX xi = constrained_xi(s.zeta);
    // momenta include the rotor coupling: mu = G xi + G_ia theta_dot
    VecX mu = sys.G_body * xi;
    mu += s.theta_dot * mm.G_ia;

    const Vec3 xg = sys.advect(xi, gamma);
    const Vec3 gamma_dot{-xg.x, -xg.y, -xg.z};
    const Vec3 du = sys.dpotential(gamma);
    const VecX kvec = sys.momentum_K(Vec3{-du.x, -du.y, -du.z}, gamma);

    VecX p_dot(3);
    for (int a = 0; a < 3; ++a) {
        const VecX ea = e.col(a);
        double f_term = 0.0;
        for (int j = 0; j < 3; ++j) {
            if (xg[j] == 0.0) continue;
            const MatX dj = sys.frame.dbasis(gamma, j);
            for (int i = 0; i < 6; ++i) f_term += xg[j] * dj(i, a) * mu[i];
        }
        p_dot[a] = mu.dot(sys.bracket(xi, ea)) - f_term + kvec.dot(ea);
    }

    // time derivatives of the Gamma-dependent metric blocks
    const MatX g = e.transposed() * sys.G_body * e;
    MatX g_rate(3, 3);
    VecX g_ia_rate(3);
    for (int j = 0; j < 3; ++j) {
        if (gamma_dot[j] == 0.0) continue;
        const MatX dj = sys.frame.dbasis(gamma, j);
        const MatX term = dj.transposed() * sys.G_body * e + e.transposed() * sys.G_body * dj;
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) g_rate(a, b) += gamma_dot[j] * term(a, b);
            double s_ia = 0.0;
            for (int i = 0; i < 6; ++i) s_ia += dj(i, a) * mm.G_ia[i];
            g_ia_rate[a] += gamma_dot[j] * s_ia;
        }
    }

    // coupled solve for (vdot, theta_ddot):
    //   [ G_dd   G_da ] [vdot ]   [ p_dot - Gdot_dd v - Gdot_da theta_dot ]
    //   [ G_ad   G_ab ] [thdd ] = [ u - Gdot_ad v                         ]
    MatX m4(4, 4);
    VecX rhs4(4);
    VecX g_da(3);
    for (int a = 0; a < 3; ++a) {
        double sda = 0.0;
        for (int i = 0; i < 6; ++i) sda += e(i, a) * mm.G_ia[i];
        g_da[a] = sda;
    }
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) m4(a, b) = g(a, b);
        m4(a, 3) = m4(3, a) = g_da[a];
        double gdot_v = 0.0;
        for (int b = 0; b < 3; ++b) gdot_v += g_rate(a, b) * v[b];
        rhs4[a] = p_dot[a] - gdot_v - g_ia_rate[a] * s.theta_dot;
    }
    m4(3, 3) = mm.G_ab;
    double gdot_ad_v = 0.0;
    for (int b = 0; b < 3; ++b) gdot_ad_v += g_ia_rate[b] * v[b];
    rhs4[3] = u - gdot_ad_v;

    VecX acc(4);
    if (!linalg::solve_spd(m4, rhs4, acc))
        throw hamel::NotPositiveDefiniteError("rotor mass matrix not positive definite");

    RotorState rate;
    rate.zeta.v1 = acc[0];
    rate.zeta.v2 = acc[1];
    rate.zeta.v3 = acc[2];
    rate.zeta.G2 = gamma_dot.y;
    rate.zeta.G3 = gamma_dot.z;
    rate.theta_dot = acc[3];
    return rate;
}

RotorState RotorDynamics::closed_loop_rhs(const RotorState& s) const {
    const ReducedState f = models::skate_vector_field(tilde_, s.zeta);
    return open_loop_rhs(s, (p_.J1 * p_.J1 / p_.sigma) * f.v1);
}

RotorState rotor_open_loop_rhs(const RotorParams& p, const RotorState& s, double u) {
    return RotorDynamics(p).open_loop_rhs(s, u);
}

RotorState closed_loop_rhs(const RotorParams& p, const RotorState& s) {
    return RotorDynamics(p).closed_loop_rhs(s);
}

double rotor_energy(const RotorParams& p, const RotorState& s) {
    const models::RotorMassMatrix mm = rotor_mass_matrix(p);
    const VecX xi = constrained_xi(s.zeta);
    const VecX mu = mm.G * xi;
    const double kinetic = 0.5 * mu.dot(xi) + s.theta_dot * mm.G_ia.dot(xi) +
                           0.5 * mm.G_ab * s.theta_dot * s.theta_dot;
    return kinetic + p.base.m * p.base.g * p.base.l * s.zeta.G3;
}

}  // namespace nhep::control
