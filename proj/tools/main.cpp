// nhep: simulate, analyze and verify nonholonomic Euler-Poincare systems
// (pendulum skate with optional internal rotor, Veselova rigid body).
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nhep/cli.hpp"
#include "nhep/scenario.hpp"
#include "nhep/sim.hpp"

namespace {

struct CommonArgs {
    std::string scenario_path;
    std::optional<double> dt;
    std::optional<double> t_end;
    std::optional<std::string> out;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_out = true) {
    cmd->add_option("--scenario", args.scenario_path, "Scenario JSON file")->required();
    cmd->add_option("--dt", args.dt, "Override integrator step [s]");
    cmd->add_option("--t-end", args.t_end, "Override horizon [s]");
    if (with_out) cmd->add_option("--out", args.out, "Write trajectory CSV here");
    cmd->add_flag("--quiet", args.quiet, "Suppress the summary");
}

nhep::cli::Overrides overrides_from(const CommonArgs& args) {
    nhep::cli::Overrides o;
    o.dt = args.dt;
    o.t_end = args.t_end;
    o.out = args.out;
    o.quiet = args.quiet;
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonholonomic Euler-Poincare simulation and stability toolkit"};
    app.require_subcommand(1);

    CommonArgs sim_args;
    CLI::App* simulate = app.add_subcommand("simulate", "Integrate a scenario, emit CSV");
    add_common(simulate, sim_args);

    CommonArgs stab_args;
    std::string eq_kind;
    double eq_y0 = 1.0, eq_omega0 = 0.0;
    std::vector<double> eq_zeta;
    CLI::App* stability = app.add_subcommand("stability", "Equilibrium stability report");
    add_common(stability, stab_args, false);
    stability->add_option("--equilibrium", eq_kind, "sliding | spinning | custom");
    stability->add_option("--Y0", eq_y0, "Slide speed of the sliding equilibrium [m/s]");
    stability->add_option("--Omega0", eq_omega0, "Spin rate of the spinning equilibrium [rad/s]");
    stability->add_option("--zeta", eq_zeta, "Custom equilibrium (v1 v2 v3 Gamma2 Gamma3)")
        ->expected(5);

    CommonArgs verify_args;
    CLI::App* verify = app.add_subcommand("verify", "Run the consistency check suites");
    add_common(verify, verify_args, false);

    CommonArgs sweep_args;
    nhep::cli::SweepSpec sweep_spec;
    CLI::App* sweep = app.add_subcommand("sweep", "Scan a parameter, report verdicts");
    add_common(sweep, sweep_args, false);
    sweep->add_option("--param", sweep_spec.param, "Omega0 | sigma | Y0")->required();
    sweep->add_option("--min", sweep_spec.min, "Range start")->required();
    sweep->add_option("--max", sweep_spec.max, "Range end")->required();
    sweep->add_option("--points", sweep_spec.points, "Grid size")->required();
    sweep->add_option("--out", sweep_spec.out_path, "Write the sweep CSV here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            const auto s = nhep::scenario::parse_file(sim_args.scenario_path);
            return nhep::cli::cmd_simulate(s, overrides_from(sim_args), std::cout);
        }
        if (stability->parsed()) {
            const auto s = nhep::scenario::parse_file(stab_args.scenario_path);
            std::optional<nhep::scenario::EquilibriumSpec> eq;
            if (!eq_kind.empty()) {
                nhep::scenario::EquilibriumSpec spec;
                if (eq_kind == "sliding") {
                    spec.kind = nhep::scenario::EquilibriumSpec::Kind::kSliding;
                    spec.Y0 = eq_y0;
                } else if (eq_kind == "spinning") {
                    spec.kind = nhep::scenario::EquilibriumSpec::Kind::kSpinning;
                    spec.Omega0 = eq_omega0;
                } else if (eq_kind == "custom") {
                    spec.kind = nhep::scenario::EquilibriumSpec::Kind::kCustom;
                    if (eq_zeta.size() != 5)
                        throw nhep::scenario::ScenarioError("--zeta needs 5 values");
                    for (size_t i = 0; i < 5; ++i) spec.zeta[i] = eq_zeta[i];
                } else {
                    throw nhep::scenario::ScenarioError("unknown --equilibrium '" + eq_kind +
                                                        "'");
                }
                eq = spec;
            }
            return nhep::cli::cmd_stability(s, eq, overrides_from(stab_args), std::cout);
        }
        if (verify->parsed()) {
            const auto s = nhep::scenario::parse_file(verify_args.scenario_path);
            return nhep::cli::cmd_verify(s, overrides_from(verify_args), std::cout);
        }
        if (sweep->parsed()) {
            const auto s = nhep::scenario::parse_file(sweep_args.scenario_path);
            return nhep::cli::cmd_sweep(s, sweep_spec, overrides_from(sweep_args), std::cout);
        }
    } catch (const nhep::scenario::ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return nhep::cli::kExitInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return nhep::cli::kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return nhep::cli::kExitVerifyFailure;
    }
    return nhep::cli::kExitInputError;
}
