#include "nhep/models.hpp"

#include <cmath>

namespace nhep::models {

namespace {

Vec3 col_omega(const VecX& xi) { return {xi[0], xi[1], xi[2]}; }

VecX pack6(const Vec3& a, const Vec3& b) {
    return {a.x, a.y, a.z, b.x, b.y, b.z};
}

}  // namespace

bool validate_physical(const SkateParams& p, std::string* why) {
    auto fail = [&](const char* msg) {
        if (why) *why = msg;
        return false;
    };
    if (!(p.m > 0.0)) return fail("mass m must be positive");
    if (!(p.l > 0.0)) return fail("length l must be positive");
    if (!(p.g > 0.0)) return fail("gravity g must be positive");
    if (!(p.I1 > 0.0 && p.I2 > 0.0 && p.I3 > 0.0)) return fail("inertias must be positive");
    if (!(p.I2 > p.I3)) return fail("I2 > I3 is required (C2 invariant)");
    return true;
}

bool validate_physical(const RotorParams& p, std::string* why) {
    if (!validate_physical(p.base, why)) return false;
    auto fail = [&](const char* msg) {
        if (why) *why = msg;
        return false;
    };
    if (!(p.J1 > 0.0 && p.J2 > 0.0 && p.J3 > 0.0)) return fail("rotor inertias must be positive");
    if (p.sigma == 0.0) return fail("sigma must be nonzero");
    if (p.sigma == p.J1) return fail("sigma = J1 makes the matched rho infinite");
    return true;
}

HamelFrame skate_frame() {
    HamelFrame f;
    f.n = 6;
    f.n_free = 3;
    f.basis = [](const Vec3& g) {
        const Vec3 e1xg = kE1.cross(g);
        MatX e(6, 6);
        e.set_col(0, pack6(kE1, Vec3{}));
        e.set_col(1, pack6(g, Vec3{}));
        e.set_col(2, pack6(Vec3{}, kE1));
        e.set_col(3, pack6(e1xg, Vec3{}));
        e.set_col(4, pack6(Vec3{}, g));
        e.set_col(5, pack6(Vec3{}, e1xg));
        return e;
    };
    f.dbasis = [](const Vec3&, int j) {
        Vec3 ej{};
        ej[j] = 1.0;
        const Vec3 e1xej = kE1.cross(ej);
        MatX d(6, 6);
        d.set_col(1, pack6(ej, Vec3{}));
        d.set_col(3, pack6(e1xej, Vec3{}));
        d.set_col(4, pack6(Vec3{}, ej));
        d.set_col(5, pack6(Vec3{}, e1xej));
        return d;
    };
    return f;
}

MatX skate_body_metric(const SkateParams& p) {
    const double ml = p.m * p.l;
    MatX g(6, 6);
    g(0, 0) = p.I1_bar();
    g(1, 1) = p.I2_bar();
    g(2, 2) = p.I3;
    g(3, 3) = g(4, 4) = g(5, 5) = p.m;
    g(1, 3) = g(3, 1) = ml;
    g(0, 4) = g(4, 0) = -ml;
    return g;
}

namespace {

ReducedSystem se3_reduced_system(const HamelFrame& frame, MatX g_body, double mgl) {
    ReducedSystem sys;
    sys.frame = frame;
    sys.G_body = std::move(g_body);
    sys.potential = [mgl](const Vec3& g) { return mgl * g.z; };
    sys.dpotential = [mgl](const Vec3&) { return Vec3{0.0, 0.0, mgl}; };
    sys.bracket = [](const VecX& a, const VecX& b) {
        return to_vec6(se3_bracket(se3_from_vec6(a), se3_from_vec6(b)));
    };
    sys.momentum_K = [](const Vec3& y, const Vec3& g) { return to_vec6(momentum_K(y, g)); };
    sys.advect = [](const VecX& xi, const Vec3& g) { return col_omega(xi).cross(g); };
    return sys;
}

}  // namespace

ReducedSystem skate_system(const SkateParams& p) {
    return se3_reduced_system(skate_frame(), skate_body_metric(p), p.m * p.g * p.l);
}

ReducedState skate_vector_field(const SkateParams& p, const ReducedState& z) {
    const double den = p.I2 * z.G2 * z.G2 + p.I3 * z.G3 * z.G3;
    const double ml = p.m * p.l;
    ReducedState d;
    d.v1 = (((p.I2_bar() - p.I3) * z.G3 * z.v2 * z.v2 + p.m * p.g * p.l) * z.G2 +
            ml * z.G3 * z.v2 * z.v3) /
           p.I1_bar();
    d.v2 = 2.0 * (p.I3 - p.I2) * z.G2 * z.G3 * z.v1 * z.v2 / den;
    d.v3 = -2.0 * p.l * p.I3 * z.G3 * z.v1 * z.v2 / den;
    d.G2 = z.v1 * z.G3;
    d.G3 = -z.v1 * z.G2;
    return d;
}

SkateInvariants skate_invariants(const SkateParams& p, const ReducedState& z) {
    SkateInvariants inv;
    inv.C1 = (p.I2 * z.G2 * z.G2 + p.I3 * z.G3 * z.G3) * z.v2;
    // The arctan coefficient is the antiderivative of 1/((I2-I3) G2^2 + I3);
    // conservation of C2 along the flow pins it to 1/sqrt(I3 (I2 - I3)).
    const double kappa = 1.0 / std::sqrt(p.I3 * (p.I2 - p.I3));
    inv.C2 = p.l * z.G2 * z.v2 + z.v3 +
             p.l * inv.C1 * kappa * std::atan(std::sqrt((p.I2 - p.I3) / p.I3) * z.G2);
    inv.C3 = 0.5 * (z.G2 * z.G2 + z.G3 * z.G3);
    const double g22 = p.I2_bar() * z.G2 * z.G2 + p.I3 * z.G3 * z.G3;
    inv.E = 0.5 * (p.I1_bar() * z.v1 * z.v1 + g22 * z.v2 * z.v2 +
                   2.0 * p.m * p.l * z.G2 * z.v2 * z.v3 + p.m * z.v3 * z.v3) +
            p.m * p.g * p.l * z.G3;
    return inv;
}

double QuasiVelocities::max_residual() const {
    return std::max({std::fabs(v4), std::fabs(v5), std::fabs(v6)});
}

QuasiVelocities quasivelocities_from_full(const FullState& z) {
    const Vec3 e1xg = kE1.cross(z.Gamma);
    QuasiVelocities q;
    q.zeta.v1 = z.Omega.dot(kE1);
    q.zeta.v2 = z.Omega.dot(z.Gamma);
    q.zeta.v3 = z.Y.dot(kE1);
    q.zeta.G2 = z.Gamma.y;
    q.zeta.G3 = z.Gamma.z;
    q.v4 = z.Omega.dot(e1xg);
    q.v5 = z.Y.dot(z.Gamma);
    q.v6 = z.Y.dot(e1xg);
    return q;
}

FullState full_from_reduced(const ReducedState& z) {
    FullState f;
    f.Gamma = {0.0, z.G2, z.G3};
    f.Omega = Vec3{z.v1, 0.0, 0.0} + z.v2 * f.Gamma;
    f.Y = {z.v3, 0.0, 0.0};
    return f;
}

RotorMassMatrix rotor_mass_matrix(const RotorParams& p) {
    SkateParams augmented = p.base;
    augmented.I1 += p.J1;
    augmented.I2 += p.J2;
    augmented.I3 += p.J3;
    RotorMassMatrix m;
    m.G = skate_body_metric(augmented);
    m.G_ia = VecX(6);
    m.G_ia[0] = p.J1;
    m.G_ab = p.J1;
    return m;
}

ReducedSystem rotor_skate_system(const RotorParams& p) {
    return se3_reduced_system(skate_frame(), rotor_mass_matrix(p).G,
                              p.base.m * p.base.g * p.base.l);
}

ReducedSystem veselova_system(const VeselovaParams& p) {
    ReducedSystem sys;
    sys.frame.n = 3;
    sys.frame.n_free = 2;
    // Gram-Schmidt chart: E1 = unit projection of the seed onto Gamma^perp,
    // E2 = nhat x E1, E3 = nhat. Smooth wherever the seed stays off axis.
    auto seed_for = [](const Vec3& nhat) {
        return std::fabs(nhat.dot(kE1)) > 0.9 ? kE2 : kE1;
    };
    sys.frame.basis = [seed_for](const Vec3& g) {
        const double nrm = g.norm();
        const Vec3 nhat = g * (1.0 / nrm);
        const Vec3 a = seed_for(nhat);
        const Vec3 s = a - nhat * a.dot(nhat);
        const Vec3 e1 = s * (1.0 / s.norm());
        const Vec3 e2 = nhat.cross(e1);
        MatX e(3, 3);
        e.set_col(0, VecX{e1.x, e1.y, e1.z});
        e.set_col(1, VecX{e2.x, e2.y, e2.z});
        e.set_col(2, VecX{nhat.x, nhat.y, nhat.z});
        return e;
    };
    sys.frame.dbasis = [seed_for](const Vec3& g, int j) {
        const double nrm = g.norm();
        const Vec3 nhat = g * (1.0 / nrm);
        const Vec3 a = seed_for(nhat);
        const Vec3 s = a - nhat * a.dot(nhat);
        const double snorm = s.norm();
        const Vec3 e1 = s * (1.0 / snorm);

        Vec3 ej{};
        ej[j] = 1.0;
        const Vec3 dnhat = (ej - nhat * nhat[j]) * (1.0 / nrm);
        const Vec3 ds = -(a.dot(dnhat)) * nhat - a.dot(nhat) * dnhat;
        const Vec3 de1 = (ds - e1 * e1.dot(ds)) * (1.0 / snorm);
        const Vec3 de2 = dnhat.cross(e1) + nhat.cross(de1);
        MatX d(3, 3);
        d.set_col(0, VecX{de1.x, de1.y, de1.z});
        d.set_col(1, VecX{de2.x, de2.y, de2.z});
        d.set_col(2, VecX{dnhat.x, dnhat.y, dnhat.z});
        return d;
    };

    MatX inertia(3, 3);
    inertia(0, 0) = p.I1;
    inertia(1, 1) = p.I2;
    inertia(2, 2) = p.I3;
    sys.G_body = inertia;

    auto u = p.potential;
    auto du = p.dpotential;
    sys.potential = [u](const Vec3& g) { return u ? u(g) : 0.0; };
    sys.dpotential = [du](const Vec3& g) { return du ? du(g) : Vec3{}; };
    sys.bracket = [](const VecX& a, const VecX& b) {
        const Vec3 c = Vec3{a[0], a[1], a[2]}.cross(Vec3{b[0], b[1], b[2]});
        return VecX{c.x, c.y, c.z};
    };
    sys.momentum_K = [](const Vec3& y, const Vec3& g) {
        const Vec3 k = y.cross(g);
        return VecX{k.x, k.y, k.z};
    };
    sys.advect = [](const VecX& xi, const Vec3& g) {
        return Vec3{xi[0], xi[1], xi[2]}.cross(g);
    };
    return sys;
}

}  // namespace nhep::models
