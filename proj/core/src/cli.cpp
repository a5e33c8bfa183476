#include "nhep/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "nhep/analysis.hpp"
#include "nhep/control.hpp"
#include "nhep/csv.hpp"
#include "nhep/hamel.hpp"
#include "nhep/oracle.hpp"

namespace nhep::cli {

namespace {

using linalg::MatX;
using linalg::VecX;
using models::ReducedState;
using models::SkateParams;
using scenario::ControlMode;
using scenario::ModelKind;
using scenario::Scenario;

// Deterministic generator for the verification suites (the primary pipeline
// itself is seedless; randomness only appears in verify sampling).
struct SplitMix64 {
    uint64_t state;
    explicit SplitMix64(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
};

std::string fmt(double v) { return csv::format_double(v); }

VecX pack_zeta(const ReducedState& z) { return {z.v1, z.v2, z.v3, z.G2, z.G3}; }
ReducedState unpack_zeta(const VecX& y) { return {y[0], y[1], y[2], y[3], y[4]}; }

sim::Rhs skate_rhs(const SkateParams& p) {
    return [p](double, const VecX& y) {
        const ReducedState d = models::skate_vector_field(p, unpack_zeta(y));
        return pack_zeta(d);
    };
}

analysis::VectorField skate_field(const SkateParams& p) {
    return [p](const VecX& y) {
        const ReducedState d = models::skate_vector_field(p, unpack_zeta(y));
        return pack_zeta(d);
    };
}

struct ColumnSet {
    std::vector<std::string> names;
    // row builder from (t, state)
    std::function<std::vector<double>(double, const VecX&)> build;
};

ColumnSet skate_columns(const SkateParams& p) {
    ColumnSet c;
    c.names = {"t",      "v1",     "v2",     "v3", "Gamma1", "Gamma2", "Gamma3",
               "Omega1", "Omega2", "Omega3", "Y1", "E",      "C1",     "C2"};
    c.build = [p](double t, const VecX& y) {
        const ReducedState z = unpack_zeta(y);
        const models::SkateInvariants inv = models::skate_invariants(p, z);
        return std::vector<double>{t,      z.v1,          z.v2,          z.v3,   0.0,
                                   z.G2,   z.G3,          z.v1,          z.v2 * z.G2,
                                   z.v2 * z.G3,           z.v3,          inv.E,  inv.C1,
                                   inv.C2};
    };
    return c;
}

// Rotor columns: invariant columns use the rotor-augmented inertias; the
// energy column is the shaped energy when matched, total energy otherwise.
ColumnSet rotor_columns(const models::RotorParams& rp, bool matched) {
    ColumnSet c;
    c.names = {"t",      "v1",     "v2",     "v3", "Gamma1", "Gamma2", "Gamma3",
               "Omega1", "Omega2", "Omega3", "Y1", "E",      "C1",     "C2"};
    if (matched) c.names.push_back("u");
    c.names.push_back("theta_dot");

    SkateParams inertia_params = rp.base;
    inertia_params.I2 += rp.J2;
    inertia_params.I3 += rp.J3;
    const SkateParams tilde = control::tilde_params(rp);

    c.build = [rp, matched, inertia_params, tilde](double t, const VecX& y) {
        const ReducedState z = unpack_zeta(y);
        const double theta_dot = y[5];
        const models::SkateInvariants ci = models::skate_invariants(inertia_params, z);
        double energy;
        if (matched) {
            energy = models::skate_invariants(tilde, z).E;
        } else {
            energy = control::rotor_energy(rp, {z, theta_dot});
        }
        std::vector<double> row{t,      z.v1,        z.v2,        z.v3, 0.0,
                                z.G2,   z.G3,        z.v1,        z.v2 * z.G2,
                                z.v2 * z.G3,         z.v3,        energy, ci.C1,
                                ci.C2};
        if (matched) row.push_back(control::control_law_skate(rp, z));
        row.push_back(theta_dot);
        return row;
    };
    return c;
}

ColumnSet veselova_columns(const hamel::ReducedSystem& sys) {
    ColumnSet c;
    c.names = {"t", "v1", "v2", "Gamma1", "Gamma2", "Gamma3", "Omega1", "Omega2", "Omega3", "E"};
    c.build = [sys](double t, const VecX& y) {
        const Vec3 gamma{y[2], y[3], y[4]};
        const MatX e = sys.frame.basis(gamma);
        Vec3 omega{};
        for (int i = 0; i < 3; ++i) omega[i] = y[0] * e(i, 0) + y[1] * e(i, 1);
        const double energy = hamel::constrained_energy(sys, VecX{y[0], y[1]}, gamma);
        return std::vector<double>{t,       y[0],    y[1],    gamma.x, gamma.y,
                                   gamma.z, omega.x, omega.y, omega.z, energy};
    };
    return c;
}

std::vector<std::vector<double>> build_rows(const ColumnSet& cols, const sim::Trajectory& traj) {
    std::vector<std::vector<double>> rows;
    rows.reserve(traj.times.size());
    for (size_t k = 0; k < traj.times.size(); ++k)
        rows.push_back(cols.build(traj.times[k], traj.states[k]));
    return rows;
}

void write_outputs(const Scenario& s, const Overrides& o, const ColumnSet& cols,
                   const std::vector<std::vector<double>>& rows, RunSummary& summary) {
    std::vector<scenario::OutputSpec> outputs = s.outputs;
    if (o.out) outputs.push_back({*o.out, {}});
    for (const auto& spec : outputs) {
        if (spec.columns.empty()) {
            csv::write_file(spec.csv_path, csv::render(cols.names, rows));
        } else {
            std::vector<size_t> idx;
            for (const std::string& want : spec.columns) {
                const auto it = std::find(cols.names.begin(), cols.names.end(), want);
                if (it == cols.names.end())
                    throw scenario::ScenarioError("unknown output column '" + want + "'");
                idx.push_back(static_cast<size_t>(it - cols.names.begin()));
            }
            std::vector<std::vector<double>> sel;
            sel.reserve(rows.size());
            for (const auto& r : rows) {
                std::vector<double> rr;
                rr.reserve(idx.size());
                for (size_t i : idx) rr.push_back(r[i]);
                sel.push_back(std::move(rr));
            }
            csv::write_file(spec.csv_path, csv::render(spec.columns, sel));
        }
        summary.written.emplace_back(spec.csv_path, rows.size());
    }
}

std::vector<sim::Monitor> skate_invariant_monitors(const SkateParams& p) {
    auto inv = [p](const VecX& y) { return models::skate_invariants(p, unpack_zeta(y)); };
    return {
        {"E", [inv](double, const VecX& y) { return inv(y).E; }},
        {"C1", [inv](double, const VecX& y) { return inv(y).C1; }},
        {"C2", [inv](double, const VecX& y) { return inv(y).C2; }},
        {"C3", [inv](double, const VecX& y) { return inv(y).C3; }},
    };
}

}  // namespace

RunSummary run_simulate(const Scenario& s, const Overrides& o) {
    RunSummary summary;
    sim::IntegratorConfig cfg;
    cfg.method = s.method;
    cfg.dt = o.dt.value_or(s.dt);
    cfg.t_end = o.t_end.value_or(s.t_end);
    if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0))
        throw scenario::ScenarioError("dt and t_end must be positive");

    if (s.model == ModelKind::kSkate) {
        const SkateParams p = s.skate;
        const ReducedState z0 = scenario::skate_initial_state(s);
        cfg.event = [](double, const VecX& y) { return y[4]; };  // Gamma3 = 0 (fall)
        cfg.monitors = skate_invariant_monitors(p);
        const sim::Trajectory traj = sim::integrate(skate_rhs(p), pack_zeta(z0), cfg);
        const sim::DriftReport drift = sim::drift_report(traj, cfg.monitors);

        summary.event_time = traj.event_time;
        const VecX& yf = traj.states.back();
        for (int i = 0; i < 5; ++i) summary.final_state.push_back(yf[i]);
        summary.invariant_names = drift.names;
        summary.abs_drift = drift.max_abs_drift;
        summary.rel_drift = drift.max_rel_drift;
        write_outputs(s, o, skate_columns(p), build_rows(skate_columns(p), traj), summary);
        return summary;
    }

    if (s.model == ModelKind::kSkateRotor) {
        const models::RotorParams rp = s.rotor_params();
        const bool matched = s.control_mode == ControlMode::kMatched;
        const ReducedState z0 = scenario::skate_initial_state(s);
        double theta_dot0;
        if (s.theta_dot0)
            theta_dot0 = *s.theta_dot0;
        else if (matched)
            theta_dot0 = control::theta_dot_for_zero_pi_tilde(rp, z0.v1);
        else
            theta_dot0 = 0.0;

        const control::RotorDynamics dyn(rp);
        sim::Rhs rhs;
        if (matched) {
            rhs = [&dyn](double, const VecX& y) {
                const control::RotorState rate = dyn.closed_loop_rhs({unpack_zeta(y), y[5]});
                return VecX{rate.zeta.v1, rate.zeta.v2, rate.zeta.v3,
                            rate.zeta.G2, rate.zeta.G3, rate.theta_dot};
            };
        } else {
            rhs = [&dyn](double, const VecX& y) {
                const control::RotorState rate = dyn.open_loop_rhs({unpack_zeta(y), y[5]}, 0.0);
                return VecX{rate.zeta.v1, rate.zeta.v2, rate.zeta.v3,
                            rate.zeta.G2, rate.zeta.G3, rate.theta_dot};
            };
        }

        SkateParams inertia_params = rp.base;
        inertia_params.I2 += rp.J2;
        inertia_params.I3 += rp.J3;
        const SkateParams tilde = control::tilde_params(rp);
        cfg.event = [](double, const VecX& y) { return y[4]; };
        cfg.monitors = {
            {"E",
             [rp, matched, tilde](double, const VecX& y) {
                 return matched ? models::skate_invariants(tilde, unpack_zeta(y)).E
                                : control::rotor_energy(rp, {unpack_zeta(y), y[5]});
             }},
            {"C1",
             [inertia_params](double, const VecX& y) {
                 return models::skate_invariants(inertia_params, unpack_zeta(y)).C1;
             }},
            {"C2",
             [inertia_params](double, const VecX& y) {
                 return models::skate_invariants(inertia_params, unpack_zeta(y)).C2;
             }},
            {matched ? "pi_tilde" : "pi",
             [rp, matched](double, const VecX& y) {
                 return matched ? control::pi_tilde(rp, y[0], y[5])
                                : rp.J1 * (y[0] + y[5]);
             }},
        };

        VecX y0{z0.v1, z0.v2, z0.v3, z0.G2, z0.G3, theta_dot0};
        const sim::Trajectory traj = sim::integrate(rhs, y0, cfg);
        const sim::DriftReport drift = sim::drift_report(traj, cfg.monitors);

        summary.event_time = traj.event_time;
        const VecX& yf = traj.states.back();
        for (int i = 0; i < 6; ++i) summary.final_state.push_back(yf[i]);
        summary.invariant_names = drift.names;
        summary.abs_drift = drift.max_abs_drift;
        summary.rel_drift = drift.max_rel_drift;
        const ColumnSet cols = rotor_columns(rp, matched);
        write_outputs(s, o, cols, build_rows(cols, traj), summary);
        return summary;
    }

    // Veselova
    const models::VeselovaParams vp = s.veselova_params();
    const hamel::ReducedSystem sys = models::veselova_system(vp);
    const auto& a = *s.vz0;
    const Vec3 omega0{a[0], a[1], a[2]};
    const Vec3 gamma0{a[3], a[4], a[5]};
    if (gamma0.norm() == 0.0) throw scenario::ScenarioError("veselova Gamma must be nonzero");
    const MatX e0 = sys.frame.basis(gamma0);
    const double constraint = omega0.dot(gamma0) / gamma0.norm();
    if (std::fabs(constraint) > 1e-6 * std::max(1.0, omega0.norm()))
        throw scenario::ScenarioError("veselova initial condition violates Gamma . Omega = 0");
    VecX y0(5);
    for (int i = 0; i < 3; ++i) {
        y0[0] += omega0[i] * e0(i, 0);
        y0[1] += omega0[i] * e0(i, 1);
    }
    y0[2] = gamma0.x;
    y0[3] = gamma0.y;
    y0[4] = gamma0.z;

    cfg.monitors = {{"E", [sys](double, const VecX& y) {
                         return hamel::constrained_energy(sys, VecX{y[0], y[1]},
                                                          Vec3{y[2], y[3], y[4]});
                     }}};
    const sim::Rhs rhs = [&sys](double, const VecX& y) { return hamel::state_rhs(sys, y); };
    const sim::Trajectory traj = sim::integrate(rhs, y0, cfg);
    const sim::DriftReport drift = sim::drift_report(traj, cfg.monitors);
    const VecX& yf = traj.states.back();
    for (int i = 0; i < 5; ++i) summary.final_state.push_back(yf[i]);
    summary.invariant_names = drift.names;
    summary.abs_drift = drift.max_abs_drift;
    summary.rel_drift = drift.max_rel_drift;
    const ColumnSet cols = veselova_columns(sys);
    write_outputs(s, o, cols, build_rows(cols, traj), summary);
    return summary;
}

int cmd_simulate(const Scenario& s, const Overrides& o, std::ostream& out) {
    const RunSummary summary = run_simulate(s, o);
    if (!o.quiet) {
        if (summary.event_time)
            out << "fall time (Gamma3 = 0): " << fmt(*summary.event_time) << "\n";
        else
            out << "no fall within the horizon\n";
        out << "final state:";
        for (double v : summary.final_state) out << " " << fmt(v);
        out << "\n";
        out << "invariant drift (max abs, max rel):\n";
        for (size_t i = 0; i < summary.invariant_names.size(); ++i)
            out << "  " << summary.invariant_names[i] << ": " << fmt(summary.abs_drift[i])
                << "  " << fmt(summary.rel_drift[i]) << "\n";
        for (const auto& [path, rows] : summary.written)
            out << "wrote " << path << " (" << rows << " rows)\n";
    }
    return kExitOk;
}

namespace {

const char* to_string(analysis::LinearVerdict v) {
    return v == analysis::LinearVerdict::kUnstable ? "unstable" : "inconclusive";
}
const char* to_string(analysis::EcVerdict v) {
    switch (v) {
        case analysis::EcVerdict::kStable: return "stable";
        case analysis::EcVerdict::kIndefinite: return "indefinite";
        default: return "inconclusive";
    }
}

std::string overall_verdict(const analysis::StabilityCertificate& cert) {
    if (cert.linear_verdict == analysis::LinearVerdict::kUnstable) return "unstable";
    if (cert.ec_verdict == analysis::EcVerdict::kStable) return "stable (energy-Casimir)";
    return "inconclusive";
}

}  // namespace

int cmd_stability(const Scenario& s, const std::optional<scenario::EquilibriumSpec>& cli_eq,
                  const Overrides& o, std::ostream& out) {
    using scenario::EquilibriumSpec;
    std::optional<EquilibriumSpec> eq = cli_eq ? cli_eq : s.equilibrium;
    if (!eq)
        throw scenario::ScenarioError(
            "stability needs an equilibrium (scenario block or --equilibrium)");
    if (s.model == ModelKind::kVeselova)
        throw scenario::ScenarioError("stability analysis targets the skate models");

    SkateParams p = s.skate;
    std::optional<models::RotorParams> rotor;
    if (s.model == ModelKind::kSkateRotor) {
        if (s.control_mode != ControlMode::kMatched)
            throw scenario::ScenarioError(
                "stability for skate_rotor requires control mode 'matched'");
        rotor = s.rotor_params();
        p = control::tilde_params(*rotor);  // analyze the shaped system
    }

    VecX zeta_eq(5);
    VecX c;
    std::string kind;
    switch (eq->kind) {
        case EquilibriumSpec::Kind::kSliding:
            kind = "sliding";
            zeta_eq = {0.0, 0.0, eq->Y0, 0.0, 1.0};
            c = analysis::sliding_multipliers(p, eq->Y0);
            break;
        case EquilibriumSpec::Kind::kSpinning:
            kind = "spinning";
            zeta_eq = {0.0, eq->Omega0, 0.0, 0.0, 1.0};
            c = analysis::spinning_multipliers(p, eq->Omega0);
            break;
        case EquilibriumSpec::Kind::kCustom: {
            for (int i = 0; i < 5; ++i) zeta_eq[i] = eq->zeta[static_cast<size_t>(i)];
            const analysis::EquilibriumReport rep =
                analysis::classify_equilibrium(p, unpack_zeta(zeta_eq));
            if (rep.residual > 1e-10)
                throw scenario::ScenarioError("supplied zeta is not an equilibrium (residual " +
                                              std::to_string(rep.residual) + ")");
            switch (rep.kind) {
                case analysis::EquilibriumKind::kSliding: kind = "custom (sliding)"; break;
                case analysis::EquilibriumKind::kSpinning: kind = "custom (spinning)"; break;
                default: kind = "custom (other)"; break;
            }
            c = analysis::stationarity_multipliers(analysis::skate_invariant_set(p), zeta_eq);
            break;
        }
    }

    const analysis::InvariantSet inv = analysis::skate_invariant_set(p);
    const analysis::StabilityCertificate cert =
        analysis::analyze_equilibrium(skate_field(p), inv, zeta_eq, c);

    if (!o.quiet) {
        out << "equilibrium: " << kind << "  zeta =";
        for (int i = 0; i < 5; ++i) out << " " << fmt(zeta_eq[i]);
        out << "\n";
        out << "eigenvalues:";
        for (const auto& ev : cert.eigenvalues)
            out << "  " << fmt(ev.real()) << (ev.imag() >= 0 ? "+" : "-")
                << fmt(std::fabs(ev.imag())) << "i";
        out << "\n";
        out << "linear verdict: " << to_string(cert.linear_verdict) << "\n";
        out << "energy-Casimir multipliers:";
        for (int i = 0; i < c.size(); ++i) out << " " << fmt(c[i]);
        out << "\n";
        out << "restricted Hessian eigenvalues:";
        for (double v : cert.restricted_eigs) out << " " << fmt(v);
        out << "\n";
        out << "energy-Casimir verdict: " << to_string(cert.ec_verdict) << "\n";
        out << "verdict: " << overall_verdict(cert) << "\n";
        try {
            out << "spinning threshold |Omega0| > " << fmt(analysis::spinning_threshold(p))
                << "\n";
        } catch (const std::domain_error&) {
            out << "spinning threshold: none (I3 + m l^2 <= I2; spinning unstable at every "
                   "rate)\n";
        }
        if (rotor)
            out << "sigma stability window: " << fmt(analysis::sigma_stability_bound(*rotor))
                << " < sigma < 0\n";
    }
    return kExitOk;
}

// --- verify ----------------------------------------------------------------

namespace {

struct CheckRunner {
    std::ostream& out;
    int failures = 0;

    void report(const std::string& name, double residual, double threshold) {
        const bool pass = residual <= threshold;
        if (!pass) ++failures;
        out << (pass ? "[PASS] " : "[FAIL] ") << name << "  residual=" << fmt(residual)
            << "  threshold=" << fmt(threshold) << "\n";
    }
};

double frame_orthonormality_residual(const hamel::ReducedSystem& sys,
                                     const std::vector<Vec3>& gammas) {
    double worst = 0.0;
    for (const Vec3& g : gammas) {
        const MatX e = sys.frame.basis(g);
        const MatX gram = e.transposed() * e;
        worst = std::max(worst, (gram - MatX::identity(e.rows())).max_abs());
    }
    return worst;
}

double frame_derivative_fd_residual(const hamel::ReducedSystem& sys,
                                    const std::vector<Vec3>& gammas, double h) {
    double worst = 0.0;
    for (const Vec3& g : gammas) {
        for (int j = 0; j < 3; ++j) {
            Vec3 gp = g, gm = g;
            gp[j] += h;
            gm[j] -= h;
            const MatX fd = (1.0 / (2.0 * h)) * (sys.frame.basis(gp) - sys.frame.basis(gm));
            worst = std::max(worst, (fd - sys.frame.dbasis(g, j)).max_abs());
        }
    }
    return worst;
}

std::vector<Vec3> skate_gamma_samples() {
    std::vector<Vec3> out;
    for (int k = 0; k < 24; ++k) {
        const double phi = 2.0 * M_PI * k / 24.0 + 0.05;
        out.push_back({0.0, std::sin(phi), std::cos(phi)});
    }
    return out;
}

double framework_vs_closed_residual(const SkateParams& p, int samples, SplitMix64& rng) {
    const hamel::ReducedSystem sys = models::skate_system(p);
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double phi = rng.uniform(0.0, 2.0 * M_PI);
        const ReducedState z{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                             rng.uniform(-2.0, 2.0), std::sin(phi), std::cos(phi)};
        const VecX y{z.v1, z.v2, z.v3, 0.0, z.G2, z.G3};
        const VecX got = hamel::state_rhs(sys, y);
        const ReducedState want = models::skate_vector_field(p, z);
        worst = std::max({worst, std::fabs(got[0] - want.v1), std::fabs(got[1] - want.v2),
                          std::fabs(got[2] - want.v3), std::fabs(got[4] - want.G2),
                          std::fabs(got[5] - want.G3), std::fabs(got[3])});
    }
    return worst;
}

// sup over [0, t_end] of the mapped difference between the multiplier-form
// trajectory and the quasivelocity trajectory
double skate_oracle_equivalence_residual(const SkateParams& p, const ReducedState& z0,
                                         double t_end, double dt) {
    sim::IntegratorConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    const sim::Trajectory reduced = sim::integrate(skate_rhs(p), pack_zeta(z0), cfg);

    const oracle::SkateOracle orc(p);
    const models::FullState f0 = models::full_from_reduced(z0);
    const sim::Rhs orhs = [&orc](double, const VecX& z) { return orc.rhs(z); };
    const sim::Trajectory full = sim::integrate(orhs, oracle::SkateOracle::pack(f0), cfg);

    double worst = 0.0;
    for (size_t k = 0; k < reduced.times.size(); ++k) {
        const models::QuasiVelocities q =
            models::quasivelocities_from_full(oracle::SkateOracle::unpack(full.states[k]));
        const VecX a = pack_zeta(q.zeta);
        const VecX b = reduced.states[k];
        for (int i = 0; i < 5; ++i) worst = std::max(worst, std::fabs(a[i] - b[i]));
    }
    return worst;
}

double veselova_oracle_equivalence_residual(const models::VeselovaParams& vp, const Vec3& omega0,
                                            const Vec3& gamma0, double t_end, double dt) {
    const hamel::ReducedSystem sys = models::veselova_system(vp);
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
    cfg.dt = dt;
    cfg.t_end = t_end;
    const sim::Rhs rrhs = [&sys](double, const VecX& y) { return hamel::state_rhs(sys, y); };
    const sim::Trajectory reduced = sim::integrate(rrhs, y0, cfg);

    const oracle::VeselovaOracle orc(vp);
    const sim::Rhs orhs = [&orc](double, const VecX& z) { return orc.rhs(z); };
    const sim::Trajectory full = sim::integrate(
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
        const VecX mapped{v1, v2, gamma.x, gamma.y, gamma.z};
        for (int i = 0; i < 5; ++i)
            worst = std::max(worst, std::fabs(mapped[i] - reduced.states[k][i]));
    }
    return worst;
}

}  // namespace

int cmd_verify(const Scenario& s, const Overrides&, std::ostream& out) {
    CheckRunner run{out};
    SplitMix64 rng(0x5eed5eed5eed5eedull);

    if (s.model == ModelKind::kVeselova) {
        const models::VeselovaParams vp = s.veselova_params();
        const hamel::ReducedSystem sys = models::veselova_system(vp);
        std::vector<Vec3> gammas;
        for (int k = 0; k < 16; ++k) {
            const double phi = 0.2 + 0.1 * k;
            gammas.push_back({0.3 * std::sin(phi), std::sin(phi) * 0.5, std::cos(phi)});
        }
        for (Vec3& g : gammas) {
            const double n = g.norm();
            g = g * (1.0 / n);
        }
        run.report("veselova.frame_orthonormality", frame_orthonormality_residual(sys, gammas),
                   1e-13);
        run.report("veselova.frame_derivative_fd",
                   frame_derivative_fd_residual(sys, gammas, 1e-5), 1e-8);
        const Vec3 gamma0{0.1, 0.2, std::sqrt(1.0 - 0.05)};
        Vec3 omega0{1.0, 0.5, 0.0};
        omega0 = omega0 - gamma0 * (omega0.dot(gamma0) / gamma0.dot(gamma0));
        run.report("veselova.oracle_equivalence",
                   veselova_oracle_equivalence_residual(vp, omega0, gamma0, 0.5, 1e-4), 1e-6);
        return run.failures == 0 ? kExitOk : kExitVerifyFailure;
    }

    const SkateParams p = s.skate;
    const hamel::ReducedSystem sys = models::skate_system(p);
    const std::vector<Vec3> gammas = skate_gamma_samples();

    run.report("hamel.frame_orthonormality", frame_orthonormality_residual(sys, gammas), 1e-13);
    run.report("hamel.frame_derivative_fd", frame_derivative_fd_residual(sys, gammas, 1e-5),
               1e-9);

    {
        double worst_sum = 0.0, worst_sym = 0.0;
        for (const Vec3& g : {Vec3{0.0, 0.3, std::sqrt(0.91)}, Vec3{0.0, -0.6, 0.8}}) {
            const hamel::ReducedTensors t = hamel::reduced_tensors(sys, g);
            for (int k = 0; k < 6; ++k)
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        worst_sum = std::max(
                            worst_sum, std::fabs(t.B(k, a, b) - t.C(k, a, b) - t.F(k, a, b)));
            worst_sym = std::max(worst_sym,
                                 (t.G - t.G.transposed()).max_abs() / t.G.max_abs());
        }
        run.report("hamel.B_equals_C_plus_F", worst_sum, 1e-15);
        run.report("hamel.metric_symmetry", worst_sym, 1e-14);
    }

    run.report("models.framework_vs_closed_form", framework_vs_closed_residual(p, 200, rng),
               1e-12);

    {
        // conservation along the scenario's own initial condition
        const ReducedState z0 = scenario::skate_initial_state(s);
        sim::IntegratorConfig cfg;
        cfg.dt = 1e-4;
        cfg.t_end = 0.5;
        cfg.monitors = skate_invariant_monitors(p);
        const sim::Trajectory traj = sim::integrate(skate_rhs(p), pack_zeta(z0), cfg);
        const sim::DriftReport drift = sim::drift_report(traj, cfg.monitors);
        double worst = 0.0;
        for (size_t i = 0; i < drift.names.size(); ++i) {
            if (drift.names[i] == "C3") continue;
            const double scale = std::fabs(drift.initial[i]);
            worst = std::max(worst, scale > 1e-12 ? drift.max_abs_drift[i] / scale
                                                  : drift.max_abs_drift[i]);
        }
        run.report("models.invariant_drift", worst, 1e-8);

        sim::IntegratorConfig gcfg;
        gcfg.dt = 1e-3;
        gcfg.t_end = 10.0;
        const sim::Trajectory gtraj = sim::integrate(skate_rhs(p), pack_zeta(z0), gcfg);
        double gworst = 0.0;
        for (const VecX& y : gtraj.states)
            gworst = std::max(gworst, std::fabs(y[3] * y[3] + y[4] * y[4] - 1.0));
        run.report("models.gamma_norm_drift", gworst, 1e-10);
    }

    {
        double worst = 0.0;
        for (int k = 0; k < 2; ++k) {
            const double phi = rng.uniform(-0.3, 0.3);
            const ReducedState z0{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                                  rng.uniform(-1.0, 1.0), std::sin(phi), std::cos(phi)};
            worst = std::max(worst, skate_oracle_equivalence_residual(p, z0, 0.3, 1e-4));
        }
        run.report("oracle.trajectory_equivalence", worst, 1e-6);
    }

    {
        // closed-form eigenvalues of the sliding linearization
        const VecX zsl{0.0, 0.0, 1.0, 0.0, 1.0};
        const MatX df = analysis::jacobian(skate_field(p), zsl);
        auto eigs = linalg::eigenvalues(df);
        std::sort(eigs.begin(), eigs.end(),
                  [](auto a, auto b) { return a.real() < b.real(); });
        const double lam = std::sqrt(p.m * p.g * p.l / p.I1_bar());
        const double want[5] = {-lam, 0.0, 0.0, 0.0, lam};
        double worst = 0.0;
        for (int i = 0; i < 5; ++i)
            worst = std::max(worst, std::hypot(eigs[static_cast<size_t>(i)].real() - want[i],
                                               eigs[static_cast<size_t>(i)].imag()));
        run.report("analysis.sliding_eigenvalues", worst, 1e-6);
    }

    if (s.model == ModelKind::kSkateRotor) {
        const models::RotorParams rp = s.rotor_params();
        control::MatchingData match = control::matching_from_sigma(rp);
        if (s.rho_override) match.rho(0, 0) = *s.rho_override;
        run.report("control.matching_residual",
                   control::matching_residual(match, models::rotor_mass_matrix(rp)), 1e-12);

        const control::RotorDynamics dyn(rp);
        const SkateParams tilde = control::tilde_params(rp);
        double worst_traj = 0.0, worst_pi = 0.0;
        for (int k = 0; k < 2; ++k) {
            const ReducedState z0{rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05),
                                  1.0 + rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05),
                                  0.0};
            ReducedState zs = z0;
            zs.G3 = std::sqrt(1.0 - zs.G2 * zs.G2);
            const double th0 = control::theta_dot_for_zero_pi_tilde(rp, zs.v1);

            sim::IntegratorConfig cfg;
            cfg.dt = 1e-4;
            cfg.t_end = 1.0;
            const sim::Rhs crhs = [&dyn](double, const VecX& y) {
                const control::RotorState rate = dyn.closed_loop_rhs({unpack_zeta(y), y[5]});
                return VecX{rate.zeta.v1, rate.zeta.v2, rate.zeta.v3,
                            rate.zeta.G2, rate.zeta.G3, rate.theta_dot};
            };
            const sim::Trajectory closed = sim::integrate(
                crhs, VecX{zs.v1, zs.v2, zs.v3, zs.G2, zs.G3, th0}, cfg);
            const sim::Trajectory shaped =
                sim::integrate(skate_rhs(tilde), pack_zeta(zs), cfg);
            for (size_t i = 0; i < closed.times.size(); ++i) {
                for (int j = 0; j < 5; ++j)
                    worst_traj = std::max(worst_traj, std::fabs(closed.states[i][j] -
                                                                shaped.states[i][j]));
                worst_pi = std::max(
                    worst_pi, std::fabs(control::pi_tilde(rp, closed.states[i][0],
                                                          closed.states[i][5])));
            }
        }
        run.report("control.closed_loop_vs_shaped", worst_traj, 1e-8);
        run.report("control.pi_tilde_drift", worst_pi, 1e-10);
    }

    return run.failures == 0 ? kExitOk : kExitVerifyFailure;
}

// --- sweep -------------------------------------------------------------------

int cmd_sweep(const Scenario& s, const SweepSpec& spec, const Overrides& o, std::ostream& out) {
    if (spec.points < 1) throw scenario::ScenarioError("sweep needs at least one grid point");
    if (spec.max < spec.min) throw scenario::ScenarioError("sweep range is empty (max < min)");
    if (spec.param != "Omega0" && spec.param != "sigma" && spec.param != "Y0")
        throw scenario::ScenarioError("sweep parameter must be Omega0 | sigma | Y0");
    if (spec.param == "sigma" && s.model != ModelKind::kSkateRotor)
        throw scenario::ScenarioError("sigma sweep requires model 'skate_rotor'");

    const int n = spec.points;
    std::vector<double> values(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        values[static_cast<size_t>(i)] =
            n == 1 ? spec.min : spec.min + (spec.max - spec.min) * i / (n - 1.0);

    const double y0_default = s.equilibrium && s.equilibrium->kind ==
                                      scenario::EquilibriumSpec::Kind::kSliding
                                  ? s.equilibrium->Y0
                                  : 1.0;

    double threshold = std::numeric_limits<double>::quiet_NaN();
    if (spec.param == "Omega0") {
        SkateParams p = s.skate;
        if (s.model == ModelKind::kSkateRotor) p = control::tilde_params(s.rotor_params());
        try {
            threshold = analysis::spinning_threshold(p);
        } catch (const std::domain_error&) {
        }
    } else if (spec.param == "sigma") {
        threshold = analysis::sigma_stability_bound(s.rotor_params());
    }

    struct Row {
        double value = 0.0;
        std::string ec = "error";
        std::string linear = "error";
    };
    std::vector<Row> rows(static_cast<size_t>(n));

    auto eval_point = [&](int i) {
        Row row;
        row.value = values[static_cast<size_t>(i)];
        try {
            SkateParams p = s.skate;
            VecX zeta_eq(5), c;
            if (spec.param == "Omega0") {
                if (s.model == ModelKind::kSkateRotor) p = control::tilde_params(s.rotor_params());
                zeta_eq = {0.0, row.value, 0.0, 0.0, 1.0};
                c = analysis::spinning_multipliers(p, row.value);
            } else if (spec.param == "sigma") {
                models::RotorParams rp = s.rotor_params();
                rp.sigma = row.value;
                p = control::tilde_params(rp);
                zeta_eq = {0.0, 0.0, y0_default, 0.0, 1.0};
                c = analysis::sliding_multipliers(p, y0_default);
            } else {  // Y0
                zeta_eq = {0.0, 0.0, row.value, 0.0, 1.0};
                c = analysis::sliding_multipliers(p, row.value);
            }
            const analysis::StabilityCertificate cert = analysis::analyze_equilibrium(
                skate_field(p), analysis::skate_invariant_set(p), zeta_eq, c);
            row.ec = to_string(cert.ec_verdict);
            row.linear = to_string(cert.linear_verdict);
        } catch (const std::exception&) {
            // leave the row marked as error
        }
        rows[static_cast<size_t>(i)] = row;
    };

    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    const int workers = std::max(1, std::min(hw, n));
    std::vector<std::thread> pool;
    std::atomic_int next{0};
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) eval_point(i);
        });
    for (auto& th : pool) th.join();

    std::vector<std::vector<std::string>> cells;
    cells.reserve(rows.size());
    for (const Row& r : rows)
        cells.push_back({fmt(r.value), r.ec == "stable" ? "1" : "0", r.ec, r.linear,
                         fmt(threshold)});
    const std::string content = csv::render_mixed(
        {spec.param, "ec_stable", "ec_verdict", "linear_verdict", "threshold"}, cells);
    if (!spec.out_path.empty())
        csv::write_file(spec.out_path, content);
    else
        out << content;
    if (!o.quiet && !spec.out_path.empty())
        out << "wrote " << spec.out_path << " (" << rows.size() << " rows)\n";
    return kExitOk;
}

}  // namespace nhep::cli
