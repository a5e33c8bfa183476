// Scenario files: JSON descriptions of a model, its parameters, the initial
// condition, integrator settings, control mode and requested outputs.
// Parsing is strict: unknown keys are rejected with a path diagnostic.
#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nhep/models.hpp"
#include "nhep/sim.hpp"

namespace nhep::scenario {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ModelKind { kSkate, kSkateRotor, kVeselova };
enum class ControlMode { kOff, kMatched };

struct PotentialSpec {
    enum class Type { kNone, kLinear } type = Type::kNone;
    Vec3 direction{0.0, 0.0, 1.0};
    double strength = 0.0;  // U(Gamma) = strength * (direction . Gamma)
};

struct OutputSpec {
    std::string csv_path;
    std::vector<std::string> columns;  // empty = full default column set
};

struct EquilibriumSpec {
    enum class Kind { kSliding, kSpinning, kCustom } kind = Kind::kSliding;
    double Y0 = 1.0;
    double Omega0 = 0.0;
    std::array<double, 5> zeta{};  // custom only
};

struct Scenario {
    ModelKind model = ModelKind::kSkate;

    models::SkateParams skate;  // also the base of the rotor model
    double J1 = 0.0, J2 = 0.0, J3 = 0.0;

    ControlMode control_mode = ControlMode::kOff;
    double sigma = 0.0;
    std::optional<double> rho_override;  // verification knob: break the matched pair
    std::optional<double> theta_dot0;    // default: the zero-pi_tilde rate

    double vI1 = 1.0, vI2 = 1.2, vI3 = 1.5;  // veselova inertias
    PotentialSpec potential;

    std::optional<double> phi0;                    // tilt-angle initial condition
    std::optional<std::array<double, 5>> zeta0;    // (v1, v2, v3, G2, G3)
    std::optional<std::array<double, 9>> full0;    // (Omega, Y, Gamma)
    std::optional<std::array<double, 6>> vz0;      // veselova (Omega, Gamma)

    sim::Method method = sim::Method::kRk4;
    double dt = 1e-4;
    double t_end = 1.0;

    std::vector<OutputSpec> outputs;
    std::optional<EquilibriumSpec> equilibrium;

    models::RotorParams rotor_params() const;
    models::VeselovaParams veselova_params() const;
};

Scenario parse_file(const std::string& path);
Scenario parse_text(const std::string& text, const std::string& origin = "<inline>");
std::string serialize(const Scenario& s);

/// The tilt-angle initial condition: Omega = (0.1, 0.1 tan phi0, 0.1),
/// Y = (1, 0, 0), Gamma = (0, sin phi0, cos phi0).
models::FullState tilt_initial_condition(double phi0);

/// Resolved reduced initial state of a skate/rotor scenario.
models::ReducedState skate_initial_state(const Scenario& s);

}  // namespace nhep::scenario
