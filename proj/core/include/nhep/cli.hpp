// Scenario-driven commands behind the nhep executable: simulate, stability,
// verify and sweep. Implemented as library functions so the test suite can
// drive them directly. Exit codes: 0 success, 1 verification failure,
// 2 input error.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nhep/scenario.hpp"

namespace nhep::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailure = 1;
inline constexpr int kExitInputError = 2;

struct Overrides {
    std::optional<double> dt;
    std::optional<double> t_end;
    std::optional<std::string> out;  // extra CSV destination
    bool quiet = false;
};

struct RunSummary {
    std::optional<double> event_time;            // first Gamma3 = 0 crossing
    std::vector<double> final_state;
    std::vector<std::string> invariant_names;
    std::vector<double> abs_drift;
    std::vector<double> rel_drift;
    std::vector<std::pair<std::string, size_t>> written;  // (path, rows)
};

/// Integrate the scenario and write its CSV outputs. Throws ScenarioError
/// on input problems, sim::NonFiniteStateError on blow-up.
RunSummary run_simulate(const scenario::Scenario& s, const Overrides& o);

int cmd_simulate(const scenario::Scenario& s, const Overrides& o, std::ostream& out);

/// Equilibrium analysis: eigenvalues, linear verdict, energy-Casimir verdict
/// with the multipliers used, and the relevant thresholds.
int cmd_stability(const scenario::Scenario& s,
                  const std::optional<scenario::EquilibriumSpec>& cli_equilibrium,
                  const Overrides& o, std::ostream& out);

/// Desk-scale verification suites (frame identities, framework-vs-closed-form,
/// conservation, oracle equivalence, matching residuals). Prints one line per
/// check; returns kExitVerifyFailure when any check fails.
int cmd_verify(const scenario::Scenario& s, const Overrides& o, std::ostream& out);

struct SweepSpec {
    std::string param;  // Omega0 | sigma | Y0
    double min = 0.0;
    double max = 0.0;
    int points = 0;
    std::string out_path;
};

int cmd_sweep(const scenario::Scenario& s, const SweepSpec& spec, const Overrides& o,
              std::ostream& out);

}  // namespace nhep::cli
