#include "nhep/hamel.hpp"

#include <cmath>

namespace nhep::hamel {

namespace {

linalg::Lu factor_frame(const MatX& e, const Vec3& gamma) {
    linalg::Lu lu(e);
    if (lu.singular() || !(lu.rcond() >= kFrameRcondTol)) {
        throw SingularFrameError("Hamel frame singular at Gamma = (" +
                                 std::to_string(gamma.x) + ", " + std::to_string(gamma.y) +
                                 ", " + std::to_string(gamma.z) + ")");
    }
    return lu;
}

// xi = sum_b v^b E_b over the constrained columns.
VecX constrained_velocity(const MatX& e, const VecX& v, int n_free) {
    VecX xi(e.rows());
    for (int b = 0; b < n_free; ++b) {
        for (int i = 0; i < e.rows(); ++i) xi[i] += v[b] * e(i, b);
    }
    return xi;
}

// D E_a applied to a tangent direction w in Gamma-space.
VecX frame_derivative_apply(const HamelFrame& frame, const Vec3& gamma, int a, const Vec3& w) {
    VecX out(frame.n);
    for (int j = 0; j < 3; ++j) {
        if (w[j] == 0.0) continue;
        const MatX dj = frame.dbasis(gamma, j);
        for (int i = 0; i < frame.n; ++i) out[i] += w[j] * dj(i, a);
    }
    return out;
}

}  // namespace

Tensor3 structure_constants(const ReducedSystem& sys, const Vec3& gamma) {
    const int n = sys.frame.n, nf = sys.frame.n_free;
    const MatX e = sys.frame.basis(gamma);
    const linalg::Lu lu = factor_frame(e, gamma);
    Tensor3 c(n, nf, nf);
    for (int a = 0; a < nf; ++a)
        for (int b = 0; b < nf; ++b) {
            const VecX br = sys.bracket(e.col(a), e.col(b));
            const VecX coeff = lu.solve(br);
            for (int k = 0; k < n; ++k) c(k, a, b) = coeff[k];
        }
    return c;
}

Tensor3 curvature_F(const ReducedSystem& sys, const Vec3& gamma) {
    const int n = sys.frame.n, nf = sys.frame.n_free;
    const MatX e = sys.frame.basis(gamma);
    const linalg::Lu lu = factor_frame(e, gamma);
    Tensor3 f(n, nf, nf);
    for (int b = 0; b < nf; ++b) {
        const Vec3 xg = sys.advect(e.col(b), gamma);
        for (int a = 0; a < nf; ++a) {
            const VecX w = frame_derivative_apply(sys.frame, gamma, a, xg);
            const VecX coeff = lu.solve(w);
            for (int i = 0; i < n; ++i) f(i, a, b) = coeff[i];
        }
    }
    return f;
}

ReducedTensors reduced_tensors(const ReducedSystem& sys, const Vec3& gamma) {
    const int n = sys.frame.n, nf = sys.frame.n_free;
    ReducedTensors t;
    t.C = structure_constants(sys, gamma);
    t.F = curvature_F(sys, gamma);
    t.B = Tensor3(n, nf, nf);
    for (int k = 0; k < n; ++k)
        for (int a = 0; a < nf; ++a)
            for (int b = 0; b < nf; ++b) t.B(k, a, b) = t.C(k, a, b) + t.F(k, a, b);

    const MatX e = sys.frame.basis(gamma);
    t.G = e.transposed() * sys.G_body * e;

    t.varkappa = MatX(3, nf);
    for (int b = 0; b < nf; ++b) {
        const Vec3 xg = sys.advect(e.col(b), gamma);
        for (int j = 0; j < 3; ++j) t.varkappa(j, b) = xg[j];
    }

    const Vec3 du = sys.dpotential(gamma);
    const VecX kvec = sys.momentum_K(Vec3{-du.x, -du.y, -du.z}, gamma);
    t.K_term = VecX(nf);
    for (int a = 0; a < nf; ++a) t.K_term[a] = kvec.dot(e.col(a));
    return t;
}

VecX momentum(const ReducedSystem& sys, const VecX& v, const Vec3& gamma) {
    const MatX e = sys.frame.basis(gamma);
    const VecX xi = constrained_velocity(e, v, sys.frame.n_free);
    const VecX mu = sys.G_body * xi;
    return e.transposed() * mu;
}

ReducedRhs reduced_rhs(const ReducedSystem& sys, const VecX& v, const Vec3& gamma) {
    const int nf = sys.frame.n_free;
    const MatX e = sys.frame.basis(gamma);
    factor_frame(e, gamma);  // invertibility contract

    const VecX xi = constrained_velocity(e, v, nf);
    const VecX mu = sys.G_body * xi;
    const Vec3 xg = sys.advect(xi, gamma);

    const Vec3 du = sys.dpotential(gamma);
    const VecX kvec = sys.momentum_K(Vec3{-du.x, -du.y, -du.z}, gamma);

    ReducedRhs out;
    out.p_dot = VecX(nf);
    for (int a = 0; a < nf; ++a) {
        const VecX ea = e.col(a);
        const double ad_term = mu.dot(sys.bracket(xi, ea));
        const double f_term = mu.dot(frame_derivative_apply(sys.frame, gamma, a, xg));
        out.p_dot[a] = ad_term - f_term + kvec.dot(ea);
    }
    out.gamma_dot = Vec3{-xg.x, -xg.y, -xg.z};
    return out;
}

VecX solve_accelerations(const ReducedSystem& sys, const VecX& v, const Vec3& gamma,
                         const VecX& p_dot) {
    const int nf = sys.frame.n_free;
    const MatX e = sys.frame.basis(gamma);
    const MatX g = e.transposed() * sys.G_body * e;
    const MatX g_dd = g.block(0, 0, nf, nf);

    const VecX xi = constrained_velocity(e, v, nf);
    const Vec3 xg = sys.advect(xi, gamma);
    const Vec3 gamma_dot{-xg.x, -xg.y, -xg.z};

    // dG/dt restricted to the constrained block, via the analytic D E
    MatX g_rate(nf, nf);
    for (int j = 0; j < 3; ++j) {
        if (gamma_dot[j] == 0.0) continue;
        const MatX dj = sys.frame.dbasis(gamma, j);
        const MatX term = dj.transposed() * sys.G_body * e + e.transposed() * sys.G_body * dj;
        for (int a = 0; a < nf; ++a)
            for (int b = 0; b < nf; ++b) g_rate(a, b) += gamma_dot[j] * term(a, b);
    }

    VecX rhs = p_dot - g_rate * v;
    VecX v_dot(nf);
    if (!linalg::solve_spd(g_dd, rhs, v_dot))
        throw NotPositiveDefiniteError("constrained mass matrix not positive definite");
    return v_dot;
}

double constrained_energy(const ReducedSystem& sys, const VecX& v, const Vec3& gamma) {
    const int nf = sys.frame.n_free;
    const MatX e = sys.frame.basis(gamma);
    const VecX xi = constrained_velocity(e, v, nf);
    const VecX mu = sys.G_body * xi;
    return 0.5 * mu.dot(xi) + sys.potential(gamma);
}

VecX state_rhs(const ReducedSystem& sys, const VecX& y) {
    const int nf = sys.frame.n_free;
    const VecX v = y.segment(0, nf);
    const Vec3 gamma{y[nf], y[nf + 1], y[nf + 2]};
    const ReducedRhs r = reduced_rhs(sys, v, gamma);
    const VecX v_dot = solve_accelerations(sys, v, gamma, r.p_dot);
    VecX out(nf + 3);
    for (int a = 0; a < nf; ++a) out[a] = v_dot[a];
    out[nf] = r.gamma_dot.x;
    out[nf + 1] = r.gamma_dot.y;
    out[nf + 2] = r.gamma_dot.z;
    return out;
}

}  // namespace nhep::hamel
