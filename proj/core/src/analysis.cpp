#include "nhep/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nhep::analysis {

namespace {

double grad_step(const VecX& x) { return 1e-5 * std::max(1.0, x.norm_inf()); }
double hess_step(const VecX& x) { return 1e-4 * std::max(1.0, x.norm_inf()); }

VecX shifted(VecX x, int i, double h) {
    x[i] += h;
    return x;
}

ReducedState state_from(const VecX& x) {
    return {x[0], x[1], x[2], x[3], x[4]};
}

}  // namespace

MatX jacobian(const VectorField& f, const VecX& x) {
    const int n = x.size();
    const double h = 1e-6 * std::max(1.0, x.norm_inf());
    const int m = f(x).size();
    MatX j(m, n);
    for (int k = 0; k < n; ++k) {
        const VecX fp = f(shifted(x, k, h));
        const VecX fm = f(shifted(x, k, -h));
        for (int i = 0; i < m; ++i) j(i, k) = (fp[i] - fm[i]) / (2.0 * h);
    }
    return j;
}

VecX fd_gradient(const ScalarField& f, const VecX& x) {
    const int n = x.size();
    const double h = grad_step(x);
    VecX g(n);
    for (int k = 0; k < n; ++k)
        g[k] = (f(shifted(x, k, h)) - f(shifted(x, k, -h))) / (2.0 * h);
    return g;
}

MatX fd_hessian(const ScalarField& f, const VecX& x) {
    const int n = x.size();
    const double h = hess_step(x);
    MatX hess(n, n);
    const double f0 = f(x);
    for (int i = 0; i < n; ++i) {
        hess(i, i) =
            (f(shifted(x, i, h)) - 2.0 * f0 + f(shifted(x, i, -h))) / (h * h);
        for (int j = i + 1; j < n; ++j) {
            const double fpp = f(shifted(shifted(x, i, h), j, h));
            const double fpm = f(shifted(shifted(x, i, h), j, -h));
            const double fmp = f(shifted(shifted(x, i, -h), j, h));
            const double fmm = f(shifted(shifted(x, i, -h), j, -h));
            hess(i, j) = hess(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
        }
    }
    return hess;
}

std::vector<std::complex<double>> eigenvalues(const MatX& a) {
    return linalg::eigenvalues(a);
}

double equilibrium_residual(const SkateParams& p, const ReducedState& z) {
    const double cond2 = ((p.I2_bar() - p.I3) * z.G3 * z.v2 * z.v2 + p.m * p.g * p.l) * z.G2 +
                         p.m * p.l * z.G3 * z.v2 * z.v3;
    const ReducedState f = models::skate_vector_field(p, z);
    const double fnorm = std::max({std::fabs(f.v1), std::fabs(f.v2), std::fabs(f.v3),
                                   std::fabs(f.G2), std::fabs(f.G3)});
    return std::max({std::fabs(z.v1), std::fabs(cond2), fnorm});
}

EquilibriumReport classify_equilibrium(const SkateParams& p, const ReducedState& z) {
    EquilibriumReport rep;
    rep.zeta_eq = z;
    rep.residual = equilibrium_residual(p, z);
    constexpr double tol = 1e-9;
    const bool upright = std::fabs(z.G2) <= tol && std::fabs(z.G3 - 1.0) <= tol &&
                         std::fabs(z.v1) <= tol;
    if (upright && std::fabs(z.v2) <= tol)
        rep.kind = EquilibriumKind::kSliding;
    else if (upright && std::fabs(z.v3) <= tol)
        rep.kind = EquilibriumKind::kSpinning;
    else
        rep.kind = EquilibriumKind::kOther;
    return rep;
}

InvariantSet skate_invariant_set(const SkateParams& p) {
    InvariantSet inv;
    inv.energy = [p](const VecX& x) { return models::skate_invariants(p, state_from(x)).E; };
    inv.casimirs = {
        [p](const VecX& x) { return models::skate_invariants(p, state_from(x)).C1; },
        [p](const VecX& x) { return models::skate_invariants(p, state_from(x)).C2; },
        [p](const VecX& x) { return models::skate_invariants(p, state_from(x)).C3; },
    };
    return inv;
}

StabilityCertificate energy_casimir_certificate(const InvariantSet& inv,
                                                const VecX& zeta_eq, const VecX& c) {
    const int n = zeta_eq.size();
    const int k = static_cast<int>(inv.casimirs.size());
    if (c.size() != k) throw std::invalid_argument("certificate: one multiplier per casimir");

    auto combined = [&](const VecX& x) {
        double s = inv.energy(x);
        for (int j = 0; j < k; ++j) s += c[j] * inv.casimirs[static_cast<size_t>(j)](x);
        return s;
    };

    StabilityCertificate cert;
    cert.multipliers = c;

    const VecX grad = fd_gradient(combined, zeta_eq);
    if (grad.norm_inf() > 1e-8)
        throw StationarityError("energy-Casimir stationarity fails: |grad| = " +
                                std::to_string(grad.norm_inf()));

    MatX dc(k, n);
    for (int j = 0; j < k; ++j) {
        const VecX g = fd_gradient(inv.casimirs[static_cast<size_t>(j)], zeta_eq);
        for (int i = 0; i < n; ++i) dc(j, i) = g[i];
    }
    cert.nullspace_basis = linalg::nullspace(dc);
    if (cert.nullspace_basis.cols() != n - k)
        throw DependentGradientsError("casimir gradients linearly dependent at equilibrium");

    const MatX hess = fd_hessian(combined, zeta_eq);
    cert.restricted_hessian =
        cert.nullspace_basis.transposed() * hess * cert.nullspace_basis;
    cert.restricted_eigs = linalg::sym_eigenvalues(cert.restricted_hessian);

    constexpr double kMargin = 1e-10;
    const auto& ev = cert.restricted_eigs;
    const bool all_pos = std::all_of(ev.begin(), ev.end(), [](double v) { return v > kMargin; });
    const bool all_neg = std::all_of(ev.begin(), ev.end(), [](double v) { return v < -kMargin; });
    const bool any_pos = std::any_of(ev.begin(), ev.end(), [](double v) { return v > kMargin; });
    const bool any_neg = std::any_of(ev.begin(), ev.end(), [](double v) { return v < -kMargin; });
    if (all_pos || all_neg)
        cert.ec_verdict = EcVerdict::kStable;
    else if (any_pos && any_neg)
        cert.ec_verdict = EcVerdict::kIndefinite;
    else
        cert.ec_verdict = EcVerdict::kInconclusive;
    return cert;
}

VecX stationarity_multipliers(const InvariantSet& inv, const VecX& zeta_eq) {
    const int n = zeta_eq.size();
    const int k = static_cast<int>(inv.casimirs.size());
    const VecX ge = fd_gradient(inv.energy, zeta_eq);
    MatX a(n, k);
    for (int j = 0; j < k; ++j) {
        const VecX g = fd_gradient(inv.casimirs[static_cast<size_t>(j)], zeta_eq);
        for (int i = 0; i < n; ++i) a(i, j) = g[i];
    }
    // normal equations are fine at k = 3, n = 5
    const MatX ata = a.transposed() * a;
    const VecX atb = a.transposed() * (-1.0 * ge);
    VecX c(k);
    if (!linalg::solve_spd(ata, atb, c))
        throw DependentGradientsError("casimir gradients linearly dependent at equilibrium");
    return c;
}

StabilityCertificate analyze_equilibrium(const VectorField& f, const InvariantSet& inv,
                                         const VecX& zeta_eq, const VecX& c) {
    StabilityCertificate cert = energy_casimir_certificate(inv, zeta_eq, c);
    cert.eigenvalues = linalg::eigenvalues(jacobian(f, zeta_eq));
    cert.linear_verdict = LinearVerdict::kInconclusive;
    for (const auto& ev : cert.eigenvalues)
        if (ev.real() > 1e-8) cert.linear_verdict = LinearVerdict::kUnstable;
    return cert;
}

VecX sliding_multipliers(const SkateParams& p, double y0) {
    return {0.0, -p.m * y0, -p.m * p.g * p.l};
}

VecX spinning_multipliers(const SkateParams& p, double w0) {
    return {-w0, 0.0, p.I3 * w0 * w0 - p.m * p.g * p.l};
}

double spinning_threshold(const SkateParams& p) {
    const double margin = p.I3 + p.m * p.l * p.l - p.I2;
    if (margin <= 0.0)
        throw std::domain_error(
            "spinning threshold undefined: I3 + m l^2 <= I2 (unstable for every rate)");
    return std::sqrt(p.m * p.g * p.l / margin);
}

double sigma_stability_bound(const RotorParams& p) {
    return -p.J1 * p.J1 / (p.base.I1 + p.base.m * p.base.l * p.base.l);
}

}  // namespace nhep::analysis
