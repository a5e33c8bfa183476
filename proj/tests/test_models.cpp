#include <doctest.h>

#include <cmath>

#include "nhep/hamel.hpp"
#include "nhep/models.hpp"
#include "nhep/oracle.hpp"
#include "nhep/sim.hpp"
#include "support.hpp"

using namespace nhep;
using linalg::MatX;
using linalg::VecX;
using models::FullState;
using models::ReducedState;
using models::RotorParams;
using models::SkateParams;
using nheptest::Rng;

namespace {

const SkateParams kRef{};  // m=2, l=0.8, g=9.8, I=(0.35, 0.35, 0.004)

ReducedState sliding(double y0) { return {0.0, 0.0, y0, 0.0, 1.0}; }
ReducedState spinning(double w0) { return {0.0, w0, 0.0, 0.0, 1.0}; }

sim::Rhs skate_rhs(const SkateParams& p) {
    return [p](double, const VecX& y) {
        const ReducedState d =
            models::skate_vector_field(p, {y[0], y[1], y[2], y[3], y[4]});
        return VecX{d.v1, d.v2, d.v3, d.G2, d.G3};
    };
}

}  // namespace

TEST_SUITE_BEGIN("models");

TEST_CASE("skate frame is orthonormal on the constraint circle") {
    const hamel::HamelFrame frame = models::skate_frame();
    for (double phi : {0.0, 0.4, 1.9, 3.3, 5.5}) {
        const MatX e = frame.basis({0.0, std::sin(phi), std::cos(phi)});
        CHECK((e.transposed() * e - MatX::identity(6)).max_abs() <= 1e-15);
    }
}

TEST_CASE("skate frame columns at the upright direction") {
    const MatX e = models::skate_frame().basis({0, 0, 1});
    // E2 = (e3, 0)
    CHECK(e(2, 1) == 1.0);
    CHECK(e(0, 1) == 0.0);
    CHECK(e(1, 1) == 0.0);
    // E4 = (e1 x e3, 0) = (-e2, 0)
    CHECK(e(1, 3) == -1.0);
    CHECK(e(0, 3) == 0.0);
    CHECK(e(2, 3) == 0.0);
}

TEST_CASE("quasivelocities of the named equilibria") {
    const models::QuasiVelocities sl = models::quasivelocities_from_full(
        {{0, 0, 0}, {1.0, 0, 0}, {0, 0, 1}});
    CHECK(sl.zeta.v1 == 0.0);
    CHECK(sl.zeta.v2 == 0.0);
    CHECK(sl.zeta.v3 == 1.0);
    CHECK(sl.zeta.G2 == 0.0);
    CHECK(sl.zeta.G3 == 1.0);
    CHECK(sl.max_residual() == 0.0);

    const models::QuasiVelocities sp = models::quasivelocities_from_full(
        {{0, 0, 2.5}, {0, 0, 0}, {0, 0, 1}});
    CHECK(sp.zeta.v1 == 0.0);
    CHECK(sp.zeta.v2 == 2.5);
    CHECK(sp.zeta.v3 == 0.0);
    CHECK(sp.max_residual() == 0.0);
}

TEST_CASE("full/reduced round trip is the identity on constrained states") {
    Rng rng(30);
    for (int k = 0; k < 200; ++k) {
        const double phi = rng.uniform(0, 2 * M_PI);
        const ReducedState z{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3),
                             std::sin(phi), std::cos(phi)};
        const FullState f = models::full_from_reduced(z);
        const models::QuasiVelocities q = models::quasivelocities_from_full(f);
        CHECK(q.max_residual() <= 1e-14);
        CHECK(q.zeta.v1 == doctest::Approx(z.v1).epsilon(1e-13));
        CHECK(q.zeta.v2 == doctest::Approx(z.v2).epsilon(1e-13));
        CHECK(q.zeta.v3 == doctest::Approx(z.v3).epsilon(1e-13));
        CHECK(q.zeta.G2 == doctest::Approx(z.G2).epsilon(1e-13));
        CHECK(q.zeta.G3 == doctest::Approx(z.G3).epsilon(1e-13));
        // pitch constancy is structural in the full view
        CHECK(f.Gamma.x == 0.0);
    }
}

TEST_CASE("tilt initial condition satisfies every constraint") {
    const double phi0 = 0.1;
    const FullState f{{0.1, 0.1 * std::tan(phi0), 0.1},
                      {1, 0, 0},
                      {0.0, std::sin(phi0), std::cos(phi0)}};
    const models::QuasiVelocities q = models::quasivelocities_from_full(f);
    CHECK(q.max_residual() <= 1e-15);
    CHECK(q.zeta.v1 == doctest::Approx(0.1));
    CHECK(q.zeta.v2 == doctest::Approx(0.1 / std::cos(phi0)).epsilon(1e-14));
    CHECK(q.zeta.v3 == doctest::Approx(1.0));
}

TEST_CASE("vector field vanishes at both upright equilibria") {
    for (const ReducedState& z : {sliding(1.7), sliding(-0.3), spinning(4.0), spinning(-2.0)}) {
        const ReducedState d = models::skate_vector_field(kRef, z);
        CHECK(std::fabs(d.v1) == 0.0);
        CHECK(std::fabs(d.v2) == 0.0);
        CHECK(std::fabs(d.v3) == 0.0);
        CHECK(std::fabs(d.G2) == 0.0);
        CHECK(std::fabs(d.G3) == 0.0);
    }
}

TEST_CASE("tilted-rest acceleration equals m g l sin(phi0) / I1_bar") {
    const double phi0 = 0.1;
    const ReducedState z{0.0, 0.0, 1.0, std::sin(phi0), std::cos(phi0)};
    const ReducedState d = models::skate_vector_field(kRef, z);
    const double want = kRef.m * kRef.g * kRef.l * std::sin(phi0) / kRef.I1_bar();
    CHECK(d.v1 == doctest::Approx(want).epsilon(1e-15));
    CHECK(want == doctest::Approx(0.9603607196455617).epsilon(1e-12));
}

TEST_CASE("invariants at the equilibria") {
    const double w0 = 3.0, y0 = 1.25;
    const models::SkateInvariants sp = models::skate_invariants(kRef, spinning(w0));
    CHECK(sp.C1 == doctest::Approx(kRef.I3 * w0).epsilon(1e-14));

    const models::SkateInvariants sl = models::skate_invariants(kRef, sliding(y0));
    CHECK(sl.C1 == 0.0);
    CHECK(sl.C2 == doctest::Approx(y0).epsilon(1e-14));
    CHECK(sl.E == doctest::Approx(0.5 * kRef.m * y0 * y0 +
                                  kRef.m * kRef.g * kRef.l)
                      .epsilon(1e-14));
    CHECK(sl.C3 == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("all four invariants are conserved along a falling trajectory") {
    // this conservation check is what pins the arctan coefficient in C2
    const double phi0 = 0.1;
    const VecX y0{0.1, 0.1 / std::cos(phi0), 1.0, std::sin(phi0), std::cos(phi0)};
    sim::IntegratorConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_end = 1.0;
    cfg.monitors = {
        {"E", [](double, const VecX& y) {
             return models::skate_invariants(kRef, {y[0], y[1], y[2], y[3], y[4]}).E;
         }},
        {"C1", [](double, const VecX& y) {
             return models::skate_invariants(kRef, {y[0], y[1], y[2], y[3], y[4]}).C1;
         }},
        {"C2", [](double, const VecX& y) {
             return models::skate_invariants(kRef, {y[0], y[1], y[2], y[3], y[4]}).C2;
         }},
        {"C3", [](double, const VecX& y) {
             return models::skate_invariants(kRef, {y[0], y[1], y[2], y[3], y[4]}).C3;
         }},
    };
    const auto traj = sim::integrate(skate_rhs(kRef), y0, cfg);
    const auto drift = sim::drift_report(traj, cfg.monitors);
    for (size_t i = 0; i < drift.names.size(); ++i) {
        const double rel = drift.initial[i] != 0.0
                               ? drift.max_abs_drift[i] / std::fabs(drift.initial[i])
                               : drift.max_abs_drift[i];
        CHECK(rel <= 1e-8);
    }
}

TEST_CASE("a deliberately wrong C2 coefficient is not conserved") {
    // the rational-coefficient variant l/(I3 (I2-I3)) fails the conservation
    // test that the implemented 1/sqrt(I3 (I2-I3)) passes
    const double phi0 = 0.1;
    const VecX y0{0.1, 0.1 / std::cos(phi0), 1.0, std::sin(phi0), std::cos(phi0)};
    auto wrong_c2 = [](const VecX& y) {
        const SkateParams& p = kRef;
        const double c1 = (p.I2 * y[3] * y[3] + p.I3 * y[4] * y[4]) * y[1];
        const double kappa = 1.0 / (p.I3 * (p.I2 - p.I3));
        return p.l * y[3] * y[1] + y[2] +
               p.l * c1 * kappa * std::atan(std::sqrt((p.I2 - p.I3) / p.I3) * y[3]);
    };
    sim::IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    cfg.monitors = {{"C2wrong", [&](double, const VecX& y) { return wrong_c2(y); }}};
    const auto traj = sim::integrate(skate_rhs(kRef), y0, cfg);
    const auto drift = sim::drift_report(traj, cfg.monitors);
    CHECK(drift.max_abs_drift[0] / std::fabs(drift.initial[0]) > 1e-4);
}

TEST_CASE("|Gamma|^2 drift stays below 1e-10 over ten seconds") {
    const double phi0 = 0.1;
    const VecX y0{0.1, 0.1 / std::cos(phi0), 1.0, std::sin(phi0), std::cos(phi0)};
    sim::IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 10.0;
    const auto traj = sim::integrate(skate_rhs(kRef), y0, cfg);
    double worst = 0.0;
    for (const VecX& y : traj.states)
        worst = std::max(worst, std::fabs(y[3] * y[3] + y[4] * y[4] - 1.0));
    CHECK(worst <= 1e-10);
}

TEST_CASE("rotor mass matrix blocks") {
    RotorParams rp;
    rp.base.m = 3.0;  // total including the rotor
    const models::RotorMassMatrix mm = models::rotor_mass_matrix(rp);
    CHECK(mm.G(0, 0) == doctest::Approx(2.275).epsilon(1e-14));  // I1 + J1 + m l^2
    CHECK((mm.G - mm.G.transposed()).max_abs() == 0.0);
    CHECK(mm.G_ia[0] == rp.J1);
    for (int i = 1; i < 6; ++i) CHECK(mm.G_ia[i] == 0.0);
    CHECK(mm.G_ab == rp.J1);
}

TEST_CASE("rotor kinetic energy equals the assembled quadratic form") {
    RotorParams rp;
    rp.base.m = 3.0;
    const models::RotorMassMatrix mm = models::rotor_mass_matrix(rp);
    Rng rng(31);
    for (int k = 0; k < 100; ++k) {
        Se3Element xi{{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)},
                      {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)}};
        const double theta_dot = rng.uniform(-5, 5);

        // direct evaluation of the rotor kinetic energy
        const SkateParams& b = rp.base;
        const double ml2 = b.m * b.l * b.l;
        const Vec3 o = xi.omega, y = xi.vel;
        const double direct =
            0.5 * ((b.I1 + ml2) * o.x * o.x + rp.J1 * (o.x + theta_dot) * (o.x + theta_dot) +
                   (b.I2 + rp.J2 + ml2) * o.y * o.y + (b.I3 + rp.J3) * o.z * o.z) +
            b.m * b.l * (o.y * y.x - o.x * y.y) + 0.5 * b.m * y.dot(y);

        const VecX xv = to_vec6(xi);
        const VecX gxi = mm.G * xv;
        const double quadratic =
            0.5 * gxi.dot(xv) + theta_dot * mm.G_ia.dot(xv) + 0.5 * mm.G_ab * theta_dot * theta_dot;
        CHECK(quadratic == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("parameter validation") {
    SkateParams bad = kRef;
    bad.I3 = 0.5;  // I2 > I3 violated
    std::string why;
    CHECK_FALSE(models::validate_physical(bad, &why));
    CHECK(why.find("I2 > I3") != std::string::npos);

    RotorParams rp;
    rp.sigma = 0.0;
    CHECK_FALSE(models::validate_physical(rp, &why));
    rp.sigma = rp.J1;
    CHECK_FALSE(models::validate_physical(rp, &why));
    rp.sigma = -1e-5;
    CHECK(models::validate_physical(rp, &why));
}

TEST_CASE("veselova constraint is structural and the free spherical body coasts") {
    models::VeselovaParams vp;
    vp.I1 = vp.I2 = vp.I3 = 1.3;  // spherical, no potential
    const hamel::ReducedSystem sys = models::veselova_system(vp);

    const Vec3 gamma0{0.1, 0.2, std::sqrt(1.0 - 0.05)};
    const MatX e0 = sys.frame.basis(gamma0);
    // v3 is dropped: any reduced state reconstructs an Omega with Gamma . Omega = 0
    const VecX v{0.7, -0.4};
    Vec3 omega{};
    for (int i = 0; i < 3; ++i) omega[i] = v[0] * e0(i, 0) + v[1] * e0(i, 1);
    CHECK(std::fabs(omega.dot(gamma0)) <= 1e-15);

    // integrate: for a spherical inertia the angular velocity must stay constant
    const sim::Rhs rhs = [&sys](double, const VecX& y) { return hamel::state_rhs(sys, y); };
    sim::IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 2.0;
    VecX y0{v[0], v[1], gamma0.x, gamma0.y, gamma0.z};
    const auto traj = sim::integrate(rhs, y0, cfg);
    for (size_t k = 0; k < traj.states.size(); k += 100) {
        const VecX& y = traj.states[k];
        const MatX e = sys.frame.basis({y[2], y[3], y[4]});
        Vec3 om{};
        for (int i = 0; i < 3; ++i) om[i] = y[0] * e(i, 0) + y[1] * e(i, 1);
        CHECK(std::fabs(om.x - omega.x) <= 1e-9);
        CHECK(std::fabs(om.y - omega.y) <= 1e-9);
        CHECK(std::fabs(om.z - omega.z) <= 1e-9);
    }
}

TEST_CASE("veselova quasivelocity flow matches the multiplier oracle") {
    models::VeselovaParams vp;
    vp.potential = [](const Vec3& g) { return 2.0 * g.z; };
    vp.dpotential = [](const Vec3&) { return Vec3{0.0, 0.0, 2.0}; };
    const hamel::ReducedSystem sys = models::veselova_system(vp);
    const oracle::VeselovaOracle orc(vp);

    const Vec3 gamma0{0.1, 0.2, std::sqrt(1.0 - 0.05)};
    Vec3 omega0{1.2, -0.3, 0.0};
    omega0 = omega0 - gamma0 * omega0.dot(gamma0);

    const MatX e0 = sys.frame.basis(gamma0);
    VecX y0(5);
    for (int i = 0; i < 3; ++i) {
        y0[0] += omega0[i] * e0(i, 0);
        y0[1] += omega0[i] * e0(i, 1);
    }
    y0[2] = gamma0.x;
    y0[3] = gamma0.y;
    y0[4] = gamma0.z;

    sim::IntegratorConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_end = 1.0;
    const sim::Rhs rrhs = [&sys](double, const VecX& y) { return hamel::state_rhs(sys, y); };
    const auto reduced = sim::integrate(rrhs, y0, cfg);
    const sim::Rhs orhs = [&orc](double, const VecX& z) { return orc.rhs(z); };
    const auto full = sim::integrate(
        orhs, VecX{omega0.x, omega0.y, omega0.z, gamma0.x, gamma0.y, gamma0.z}, cfg);

    double worst = 0.0;
    for (size_t k = 0; k < reduced.times.size(); ++k) {
        const VecX& z = full.states[k];
        const Vec3 gamma{z[3], z[4], z[5]};
        const MatX e = sys.frame.basis(gamma);
        double v1 = 0.0, v2 = 0.0;
        for (int i = 0; i < 3; ++i) {
            v1 += z[i] * e(i, 0);
            v2 += z[i] * e(i, 1);
        }
        worst = std::max({worst, std::fabs(v1 - reduced.states[k][0]),
                          std::fabs(v2 - reduced.states[k][1]),
                          std::fabs(gamma.x - reduced.states[k][2]),
                          std::fabs(gamma.y - reduced.states[k][3]),
                          std::fabs(gamma.z - reduced.states[k][4])});
    }
    CHECK(worst <= 1e-6);
}

TEST_SUITE_END();
