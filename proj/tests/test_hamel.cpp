#include <doctest.h>

#include <cmath>

#include "nhep/hamel.hpp"
#include "nhep/models.hpp"
#include "nhep/sim.hpp"
#include "support.hpp"

using namespace nhep;
using hamel::ReducedSystem;
using linalg::MatX;
using linalg::VecX;
using models::ReducedState;
using models::SkateParams;
using nheptest::Rng;

namespace {

Vec3 circle_gamma(double phi) { return {0.0, std::sin(phi), std::cos(phi)}; }

// free so(3) system in the identity frame: constant metric, no potential
ReducedSystem identity_so3_system() {
    ReducedSystem sys;
    sys.frame.n = 3;
    sys.frame.n_free = 3;
    sys.frame.basis = [](const Vec3&) { return MatX::identity(3); };
    sys.frame.dbasis = [](const Vec3&, int) { return MatX(3, 3); };
    MatX inertia(3, 3);
    inertia(0, 0) = 1.0;
    inertia(1, 1) = 2.0;
    inertia(2, 2) = 3.0;
    sys.G_body = inertia;
    sys.potential = [](const Vec3&) { return 0.0; };
    sys.dpotential = [](const Vec3&) { return Vec3{}; };
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

double momentum_p4(const SkateParams& p, const ReducedState& z) {
    return (p.I3 - p.I2_bar()) * z.G2 * z.G3 * z.v2 - p.m * p.l * z.G3 * z.v3;
}
double momentum_p6(const SkateParams& p, const ReducedState& z) {
    return p.m * p.l * z.G3 * z.v1;
}

}  // namespace

TEST_SUITE_BEGIN("hamel");

TEST_CASE("structure constants contract to the expected coadjoint matrix") {
    const SkateParams p;
    const ReducedSystem sys = models::skate_system(p);
    Rng rng(20);
    for (int trial = 0; trial < 5; ++trial) {
        const Vec3 gamma = circle_gamma(rng.uniform(0, 2 * M_PI));
        const hamel::Tensor3 c = hamel::structure_constants(sys, gamma);

        VecX pvec(6);
        for (int i = 0; i < 6; ++i) pvec[i] = rng.uniform(-2, 2);

        // The matrix whose (a, b) entry is <p, [E_b, E_a]> --- the orientation
        // appearing in the coadjoint pairing of the momentum equation.
        MatX m(3, 3);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int k = 0; k < 6; ++k) m(a, b) += c(k, b, a) * pvec[k];

        MatX want(3, 3);
        want(0, 1) = -pvec[3];
        want(1, 0) = pvec[3];
        want(1, 2) = pvec[5];
        want(2, 1) = -pvec[5];
        CHECK((m - want).max_abs() <= 1e-13);

        // bracket antisymmetry
        for (int k = 0; k < 6; ++k)
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    CHECK(std::fabs(c(k, a, b) + c(k, b, a)) <= 1e-13);
    }
}

TEST_CASE("identity frame gives the fixed structure constants") {
    const ReducedSystem sys = identity_so3_system();
    const hamel::Tensor3 c = hamel::structure_constants(sys, {0, 0, 1});
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            VecX ea(3), eb(3);
            ea[a] = 1.0;
            eb[b] = 1.0;
            const VecX br = sys.bracket(ea, eb);
            for (int k = 0; k < 3; ++k) CHECK(c(k, a, b) == doctest::Approx(br[k]).epsilon(1e-14));
        }
}

TEST_CASE("curvature vanishes for a Gamma-independent frame") {
    const hamel::Tensor3 f = hamel::curvature_F(identity_so3_system(), {0.2, -0.4, 0.8});
    for (int k = 0; k < 3; ++k)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) CHECK(f(k, a, b) == 0.0);
}

TEST_CASE("skate curvature contraction matches the finite-difference oracle") {
    const SkateParams p;
    const ReducedSystem sys = models::skate_system(p);
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const ReducedState z{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2),
                             0.0, 0.0};
        const Vec3 gamma = circle_gamma(rng.uniform(0, 2 * M_PI));
        ReducedState zz = z;
        zz.G2 = gamma.y;
        zz.G3 = gamma.z;

        const MatX e = sys.frame.basis(gamma);
        VecX xi(6);
        const VecX v{zz.v1, zz.v2, zz.v3};
        for (int b = 0; b < 3; ++b)
            for (int i = 0; i < 6; ++i) xi[i] += v[b] * e(i, b);
        const VecX mu = sys.G_body * xi;
        const Vec3 xg = sys.advect(xi, gamma);

        const hamel::Tensor3 f = hamel::curvature_F(sys, gamma);
        const VecX pvec = hamel::momentum(sys, v, gamma);

        for (int a = 0; a < 3; ++a) {
            double contraction = 0.0;
            for (int i = 0; i < 6; ++i)
                for (int b = 0; b < 3; ++b) contraction += f(i, a, b) * pvec[i] * v[b];

            // finite-difference oracle: d/deps <mu, E_a(Gamma + eps xiGamma)>
            const double eps = 1e-7;
            const Vec3 gp = gamma + xg * eps;
            const Vec3 gm = gamma + xg * (-eps);
            const double fd =
                (mu.dot(sys.frame.basis(gp).col(a)) - mu.dot(sys.frame.basis(gm).col(a))) /
                (2.0 * eps);
            CHECK(contraction == doctest::Approx(fd).epsilon(1e-6));

            // closed form: only the Gamma-column moves, giving v1 * p4 for a = 1
            const double want = (a == 1) ? zz.v1 * momentum_p4(p, zz) : 0.0;
            CHECK(contraction == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("reduced rhs equals the closed-form field on 1000 states") {
    const SkateParams p;
    const ReducedSystem sys = models::skate_system(p);
    Rng rng(22);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double phi = rng.uniform(0, 2 * M_PI);
        const ReducedState z{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2),
                             std::sin(phi), std::cos(phi)};
        const VecX y{z.v1, z.v2, z.v3, 0.0, z.G2, z.G3};
        const VecX got = hamel::state_rhs(sys, y);
        const ReducedState want = models::skate_vector_field(p, z);
        worst = std::max({worst, std::fabs(got[0] - want.v1), std::fabs(got[1] - want.v2),
                          std::fabs(got[2] - want.v3), std::fabs(got[3]),
                          std::fabs(got[4] - want.G2), std::fabs(got[5] - want.G3)});
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("momentum rates at rest reduce to the potential torque") {
    const SkateParams p;
    const ReducedSystem sys = models::skate_system(p);

    // upright, no velocity: the gravity torque m g l Gamma2 vanishes
    const hamel::ReducedRhs upright = hamel::reduced_rhs(sys, VecX{0, 0, 0}, {0, 0, 1});
    CHECK(upright.p_dot.norm_inf() == 0.0);

    // tilted, no velocity: pure m g l Gamma2 in the first slot
    const Vec3 g = circle_gamma(0.3);
    const hamel::ReducedRhs tilted = hamel::reduced_rhs(sys, VecX{0, 0, 0}, g);
    CHECK(tilted.p_dot[0] == doctest::Approx(p.m * p.g * p.l * g.y).epsilon(1e-14));
    CHECK(std::fabs(tilted.p_dot[1]) <= 1e-14);
    CHECK(std::fabs(tilted.p_dot[2]) <= 1e-14);

    // dGamma/dt = Gamma x Omega, reconstructed from the quasivelocities
    Rng rng(23);
    const VecX v{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const hamel::ReducedRhs r = hamel::reduced_rhs(sys, v, g);
    const Vec3 omega = Vec3{v[0], 0, 0} + v[1] * g;
    const Vec3 want = g.cross(omega);
    CHECK(r.gamma_dot.x == doctest::Approx(want.x).epsilon(1e-14));
    CHECK(r.gamma_dot.y == doctest::Approx(want.y).epsilon(1e-14));
    CHECK(r.gamma_dot.z == doctest::Approx(want.z).epsilon(1e-14));
}

TEST_CASE("solve_accelerations: constant metric, zero rate") {
    const ReducedSystem sys = identity_so3_system();
    const VecX v{0.4, -0.2, 0.7};
    const VecX vdot = hamel::solve_accelerations(sys, v, {0, 0, 1}, VecX{0, 0, 0});
    CHECK(vdot.norm_inf() <= 1e-15);
}

TEST_CASE("solve_accelerations residual on the skate") {
    const SkateParams p;
    const ReducedSystem sys = models::skate_system(p);
    Rng rng(24);
    const Vec3 gamma = circle_gamma(0.6);
    const VecX v{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    VecX pdot(3);
    for (int i = 0; i < 3; ++i) pdot[i] = rng.uniform(-1, 1);
    const VecX vdot = hamel::solve_accelerations(sys, v, gamma, pdot);

    // residual of G_dd vdot = pdot - Gdot_dd v
    const MatX e = sys.frame.basis(gamma);
    const MatX g = (e.transposed() * sys.G_body * e).block(0, 0, 3, 3);
    VecX xi(6);
    for (int b = 0; b < 3; ++b)
        for (int i = 0; i < 6; ++i) xi[i] += v[b] * e(i, b);
    const Vec3 xg = sys.advect(xi, gamma);
    MatX grate(3, 3);
    for (int j = 0; j < 3; ++j) {
        const MatX dj = sys.frame.dbasis(gamma, j);
        const MatX term =
            dj.transposed() * sys.G_body * e + e.transposed() * sys.G_body * dj;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) grate(a, b) += -xg[j] * term.block(0, 0, 3, 3)(a, b);
    }
    const VecX resid = g * vdot - (pdot - grate * v);
    CHECK(resid.norm_inf() <= 1e-12);
}

TEST_CASE("non positive definite constrained metric is rejected") {
    ReducedSystem sys = identity_so3_system();
    sys.G_body(2, 2) = -3.0;
    CHECK_THROWS_AS(hamel::solve_accelerations(sys, VecX{0, 0, 0}, {0, 0, 1}, VecX{0, 0, 0}),
                    hamel::NotPositiveDefiniteError);
}

TEST_CASE("singular frame is rejected with the dedicated error") {
    ReducedSystem sys = identity_so3_system();
    sys.frame.basis = [](const Vec3&) {
        MatX e = MatX::identity(3);
        e.set_col(0, e.col(1));  // two equal columns
        return e;
    };
    CHECK_THROWS_AS(hamel::structure_constants(sys, {0, 0, 1}), hamel::SingularFrameError);
    CHECK_THROWS_AS(hamel::reduced_rhs(sys, VecX{1, 0, 0}, {0, 0, 1}),
                    hamel::SingularFrameError);
}

TEST_CASE("constrained energy values") {
    SkateParams p;
    p.m = 2.0;
    p.l = 0.8;
    p.g = 9.8;
    const ReducedSystem sys = models::skate_system(p);
    // sliding state with Y0 = 1: E = 1/2 m Y0^2 + m g l
    CHECK(hamel::constrained_energy(sys, VecX{0, 0, 1}, {0, 0, 1}) ==
          doctest::Approx(16.68).epsilon(1e-14));
    CHECK(hamel::constrained_energy(sys, VecX{0, 0, 0}, {0, 0, 1}) ==
          doctest::Approx(p.m * p.g * p.l).epsilon(1e-14));
}

TEST_CASE("constrained energy is conserved by the reduced flow") {
    const SkateParams p;
    const ReducedSystem sys = models::skate_system(p);
    const sim::Rhs rhs = [&sys](double, const VecX& y) { return hamel::state_rhs(sys, y); };
    sim::IntegratorConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_end = 1.0;
    cfg.monitors = {{"E", [&sys](double, const VecX& y) {
                         return hamel::constrained_energy(sys, y.segment(0, 3),
                                                          {y[3], y[4], y[5]});
                     }}};
    // perturbed sliding start, mapped into the frame
    const double phi0 = 0.1;
    const VecX y0{0.1, 0.1 / std::cos(phi0), 1.0, 0.0, std::sin(phi0), std::cos(phi0)};
    const auto traj = sim::integrate(rhs, y0, cfg);
    const auto drift = sim::drift_report(traj, cfg.monitors);
    CHECK(drift.max_abs_drift[0] / std::fabs(drift.initial[0]) <= 1e-8);
}

TEST_CASE("assembled tensors: B = C + F, metric symmetric and frame-congruent") {
    const SkateParams p;
    const ReducedSystem sys = models::skate_system(p);
    for (double phi : {0.13, 1.7, 4.0}) {
        const Vec3 gamma = circle_gamma(phi);
        const hamel::ReducedTensors t = hamel::reduced_tensors(sys, gamma);
        for (int k = 0; k < 6; ++k)
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    CHECK(t.B(k, a, b) == t.C(k, a, b) + t.F(k, a, b));

        const double asym = (t.G - t.G.transposed()).max_abs();
        CHECK(asym / t.G.max_abs() <= 1e-14);

        const MatX e = sys.frame.basis(gamma);
        CHECK((t.G - e.transposed() * sys.G_body * e).max_abs() <= 1e-13);

        // K term at this Gamma: (m g l Gamma2, 0, 0)
        CHECK(t.K_term[0] == doctest::Approx(p.m * p.g * p.l * gamma.y).epsilon(1e-13));
        CHECK(std::fabs(t.K_term[1]) <= 1e-13);
        CHECK(std::fabs(t.K_term[2]) <= 1e-13);

        // varkappa columns are the advected actions of the frame columns
        for (int b = 0; b < 3; ++b) {
            const Vec3 xg = sys.advect(e.col(b), gamma);
            for (int j = 0; j < 3; ++j)
                CHECK(t.varkappa(j, b) == doctest::Approx(xg[j]).epsilon(1e-14));
        }
    }
}

TEST_CASE("frame derivative matches central differences at h = 1e-4 and 1e-5") {
    const ReducedSystem skate = models::skate_system(SkateParams{});
    models::VeselovaParams vp;
    const ReducedSystem ves = models::veselova_system(vp);

    auto fd_error = [](const ReducedSystem& sys, const Vec3& g, double h) {
        double worst = 0.0;
        for (int j = 0; j < 3; ++j) {
            Vec3 gp = g, gm = g;
            gp[j] += h;
            gm[j] -= h;
            const MatX fd = (1.0 / (2 * h)) * (sys.frame.basis(gp) - sys.frame.basis(gm));
            worst = std::max(worst, (fd - sys.frame.dbasis(g, j)).max_abs());
        }
        return worst;
    };

    const Vec3 gs = circle_gamma(0.7);
    CHECK(fd_error(skate, gs, 1e-4) <= 1e-10);  // frame linear in Gamma
    CHECK(fd_error(skate, gs, 1e-5) <= 1e-10);

    const Vec3 gv{0.2, -0.3, 0.9327379053088816};
    CHECK(fd_error(ves, gv, 1e-4) <= 1e-6);
    CHECK(fd_error(ves, gv, 1e-5) <= 1e-8);
    // O(h^2): a decade in h buys two decades in error
    const double e3 = fd_error(ves, gv, 1e-3);
    const double e4 = fd_error(ves, gv, 1e-4);
    CHECK(e3 / e4 > 50.0);
    CHECK(e3 / e4 < 200.0);
}

TEST_CASE("tensor contraction route agrees with the pairing route") {
    // the momentum rates can be assembled two ways: contracting the
    // materialized tensors (-B^i_{ab} p_i v^b + K_a) or pairing directly
    // against the frame; both must agree to roundoff
    const SkateParams p;
    const ReducedSystem sys = models::skate_system(p);
    Rng rng(26);
    for (int trial = 0; trial < 50; ++trial) {
        const double phi = rng.uniform(0, 2 * M_PI);
        const Vec3 gamma = circle_gamma(phi);
        const VecX v{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};

        const hamel::ReducedTensors t = hamel::reduced_tensors(sys, gamma);
        const VecX pvec = hamel::momentum(sys, v, gamma);
        VecX pdot_tensor(3);
        for (int a = 0; a < 3; ++a) {
            double s = t.K_term[a];
            for (int i = 0; i < 6; ++i)
                for (int b = 0; b < 3; ++b) s -= t.B(i, a, b) * pvec[i] * v[b];
            pdot_tensor[a] = s;
        }

        const hamel::ReducedRhs r = hamel::reduced_rhs(sys, v, gamma);
        CHECK((pdot_tensor - r.p_dot).norm_inf() <= 1e-11);

        // Gamma rate from the varkappa contraction
        for (int j = 0; j < 3; ++j) {
            double gdot = 0.0;
            for (int b = 0; b < 3; ++b) gdot -= t.varkappa(j, b) * v[b];
            CHECK(gdot == doctest::Approx(r.gamma_dot[j]).epsilon(1e-13));
        }

        // p = G v on the constrained block
        for (int a = 0; a < 3; ++a) {
            double s = 0.0;
            for (int b = 0; b < 3; ++b) s += t.G(a, b) * v[b];
            CHECK(s == doctest::Approx(pvec[a]).epsilon(1e-12));
        }
    }
}

TEST_CASE("momentum components match the closed-form list") {
    const SkateParams p;
    const ReducedSystem sys = models::skate_system(p);
    Rng rng(25);
    const double phi = rng.uniform(0, 2 * M_PI);
    const ReducedState z{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                         std::sin(phi), std::cos(phi)};
    const VecX pvec =
        hamel::momentum(sys, VecX{z.v1, z.v2, z.v3}, {0.0, z.G2, z.G3});
    const double i2b = p.I2_bar();
    CHECK(pvec[0] == doctest::Approx(p.I1_bar() * z.v1).epsilon(1e-13));
    CHECK(pvec[1] == doctest::Approx((i2b * z.G2 * z.G2 + p.I3 * z.G3 * z.G3) * z.v2 +
                                     p.m * p.l * z.G2 * z.v3)
                         .epsilon(1e-13));
    CHECK(pvec[2] == doctest::Approx(p.m * (p.l * z.G2 * z.v2 + z.v3)).epsilon(1e-13));
    CHECK(pvec[3] == doctest::Approx(momentum_p4(p, z)).epsilon(1e-13));
    CHECK(pvec[4] == doctest::Approx(-p.m * p.l * z.G2 * z.v1).epsilon(1e-13));
    CHECK(pvec[5] == doctest::Approx(momentum_p6(p, z)).epsilon(1e-13));
}

TEST_SUITE_END();
