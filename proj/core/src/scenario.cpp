#include "nhep/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nhep::scenario {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
    throw ScenarioError(origin + ": " + msg);
}

void check_keys(const std::string& origin, const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) fail(origin, "unknown key '" + it.key() + "' in '" + where + "'");
    }
}

double need_number(const std::string& origin, const json& obj, const std::string& where,
                   const char* key) {
    if (!obj.contains(key)) fail(origin, "missing key '" + std::string(key) + "' in '" + where + "'");
    if (!obj[key].is_number()) fail(origin, "'" + where + "." + key + "' must be a number");
    return obj[key].get<double>();
}

template <size_t N>
std::array<double, N> need_array(const std::string& origin, const json& obj,
                                 const std::string& where, const char* key) {
    if (!obj.contains(key)) fail(origin, "missing key '" + std::string(key) + "' in '" + where + "'");
    const json& a = obj[key];
    if (!a.is_array() || a.size() != N)
        fail(origin, "'" + where + "." + key + "' must be an array of " + std::to_string(N) +
                         " numbers");
    std::array<double, N> out{};
    for (size_t i = 0; i < N; ++i) {
        if (!a[i].is_number()) fail(origin, "'" + where + "." + key + "' must be numeric");
        out[i] = a[i].get<double>();
    }
    return out;
}

std::pair<int, int> line_col(const std::string& text, size_t byte) {
    int line = 1, col = 1;
    for (size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

models::RotorParams Scenario::rotor_params() const {
    models::RotorParams p;
    p.base = skate;
    p.J1 = J1;
    p.J2 = J2;
    p.J3 = J3;
    p.sigma = sigma;
    return p;
}

models::VeselovaParams Scenario::veselova_params() const {
    models::VeselovaParams p;
    p.I1 = vI1;
    p.I2 = vI2;
    p.I3 = vI3;
    if (potential.type == PotentialSpec::Type::kLinear) {
        const Vec3 dir = potential.direction;
        const double c = potential.strength;
        p.potential = [dir, c](const Vec3& g) { return c * dir.dot(g); };
        p.dpotential = [dir, c](const Vec3&) { return c * dir; };
    }
    return p;
}

models::FullState tilt_initial_condition(double phi0) {
    return {{0.1, 0.1 * std::tan(phi0), 0.1}, {1.0, 0.0, 0.0},
            {0.0, std::sin(phi0), std::cos(phi0)}};
}

models::ReducedState skate_initial_state(const Scenario& s) {
    if (s.zeta0) {
        const models::ReducedState z = models::ReducedState::from_array(*s.zeta0);
        if (std::fabs(z.G2 * z.G2 + z.G3 * z.G3 - 1.0) > 1e-6)
            throw ScenarioError("initial zeta must satisfy Gamma2^2 + Gamma3^2 = 1");
        return z;
    }
    models::FullState full;
    if (s.phi0) {
        full = tilt_initial_condition(*s.phi0);
    } else if (s.full0) {
        const auto& a = *s.full0;
        full = {{a[0], a[1], a[2]}, {a[3], a[4], a[5]}, {a[6], a[7], a[8]}};
    } else {
        throw ScenarioError("scenario has no skate initial condition (phi0, zeta or Omega/Y/Gamma)");
    }
    const models::QuasiVelocities q = models::quasivelocities_from_full(full);
    if (!q.constrained(1e-6))
        throw ScenarioError("initial condition violates the skate constraints: max residual " +
                            std::to_string(q.max_residual()));
    if (std::fabs(full.Gamma.x) > 1e-6)
        throw ScenarioError("initial condition violates pitch constancy (Gamma1 != 0)");
    return q.zeta;
}

Scenario parse_text(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte);
        fail(origin, "JSON syntax error at line " + std::to_string(line) + ", column " +
                         std::to_string(col) + ": " + e.what());
    }
    if (!root.is_object()) fail(origin, "top level must be an object");
    check_keys(origin, root, "<top>",
               {"model", "params", "control", "initial", "integrator", "outputs", "equilibrium"});

    Scenario s;
    if (!root.contains("model") || !root["model"].is_string())
        fail(origin, "missing or non-string 'model'");
    const std::string model = root["model"].get<std::string>();
    if (model == "skate")
        s.model = ModelKind::kSkate;
    else if (model == "skate_rotor")
        s.model = ModelKind::kSkateRotor;
    else if (model == "veselova")
        s.model = ModelKind::kVeselova;
    else
        fail(origin, "unknown model '" + model + "' (skate | skate_rotor | veselova)");

    if (!root.contains("params") || !root["params"].is_object())
        fail(origin, "missing 'params' object");
    const json& params = root["params"];
    if (s.model == ModelKind::kVeselova) {
        check_keys(origin, params, "params", {"I", "potential"});
        const auto inertia = need_array<3>(origin, params, "params", "I");
        s.vI1 = inertia[0];
        s.vI2 = inertia[1];
        s.vI3 = inertia[2];
        if (!(s.vI1 > 0 && s.vI2 > 0 && s.vI3 > 0)) fail(origin, "veselova inertias must be positive");
        if (params.contains("potential")) {
            const json& pot = params["potential"];
            check_keys(origin, pot, "params.potential", {"type", "direction", "strength"});
            const std::string type = pot.value("type", "none");
            if (type == "none") {
                s.potential.type = PotentialSpec::Type::kNone;
            } else if (type == "linear") {
                s.potential.type = PotentialSpec::Type::kLinear;
                const auto dir = need_array<3>(origin, pot, "params.potential", "direction");
                s.potential.direction = {dir[0], dir[1], dir[2]};
                s.potential.strength = need_number(origin, pot, "params.potential", "strength");
            } else {
                fail(origin, "unknown potential type '" + type + "' (none | linear)");
            }
        }
    } else {
        if (s.model == ModelKind::kSkate)
            check_keys(origin, params, "params", {"m", "l", "g", "I"});
        else
            check_keys(origin, params, "params", {"m", "l", "g", "I", "J"});
        s.skate.m = need_number(origin, params, "params", "m");
        s.skate.l = need_number(origin, params, "params", "l");
        s.skate.g = need_number(origin, params, "params", "g");
        const auto inertia = need_array<3>(origin, params, "params", "I");
        s.skate.I1 = inertia[0];
        s.skate.I2 = inertia[1];
        s.skate.I3 = inertia[2];
        std::string why;
        if (!models::validate_physical(s.skate, &why)) fail(origin, "params: " + why);
        if (s.model == ModelKind::kSkateRotor) {
            const auto rotor = need_array<3>(origin, params, "params", "J");
            s.J1 = rotor[0];
            s.J2 = rotor[1];
            s.J3 = rotor[2];
            if (!(s.J1 > 0 && s.J2 > 0 && s.J3 > 0))
                fail(origin, "rotor inertias must be positive");
        }
    }

    if (root.contains("control")) {
        const json& ctl = root["control"];
        check_keys(origin, ctl, "control", {"mode", "sigma", "rho", "theta_dot0"});
        const std::string mode = ctl.value("mode", "off");
        if (mode == "off")
            s.control_mode = ControlMode::kOff;
        else if (mode == "matched")
            s.control_mode = ControlMode::kMatched;
        else
            fail(origin, "unknown control mode '" + mode + "' (off | matched)");
        if (s.control_mode == ControlMode::kMatched) {
            if (s.model != ModelKind::kSkateRotor)
                fail(origin, "matched control requires model 'skate_rotor'");
            s.sigma = need_number(origin, ctl, "control", "sigma");
            if (s.sigma == 0.0) fail(origin, "control.sigma must be nonzero");
        } else if (ctl.contains("sigma")) {
            fail(origin, "control.sigma is only valid with mode 'matched'");
        }
        if (ctl.contains("rho")) s.rho_override = need_number(origin, ctl, "control", "rho");
        if (ctl.contains("theta_dot0"))
            s.theta_dot0 = need_number(origin, ctl, "control", "theta_dot0");
    } else if (s.model == ModelKind::kSkateRotor) {
        fail(origin, "model 'skate_rotor' requires a 'control' block (mode off or matched)");
    }

    if (!root.contains("initial") || !root["initial"].is_object())
        fail(origin, "missing 'initial' object");
    const json& init = root["initial"];
    if (s.model == ModelKind::kVeselova) {
        check_keys(origin, init, "initial", {"Omega", "Gamma"});
        const auto omega = need_array<3>(origin, init, "initial", "Omega");
        const auto gamma = need_array<3>(origin, init, "initial", "Gamma");
        s.vz0 = {omega[0], omega[1], omega[2], gamma[0], gamma[1], gamma[2]};
    } else {
        check_keys(origin, init, "initial", {"phi0", "zeta", "Omega", "Y", "Gamma"});
        int forms = 0;
        if (init.contains("phi0")) {
            s.phi0 = need_number(origin, init, "initial", "phi0");
            ++forms;
        }
        if (init.contains("zeta")) {
            s.zeta0 = need_array<5>(origin, init, "initial", "zeta");
            ++forms;
        }
        if (init.contains("Omega") || init.contains("Y") || init.contains("Gamma")) {
            const auto omega = need_array<3>(origin, init, "initial", "Omega");
            const auto yvel = need_array<3>(origin, init, "initial", "Y");
            const auto gamma = need_array<3>(origin, init, "initial", "Gamma");
            s.full0 = {omega[0], omega[1], omega[2], yvel[0], yvel[1],
                       yvel[2],  gamma[0], gamma[1], gamma[2]};
            ++forms;
        }
        if (forms != 1)
            fail(origin, "'initial' must specify exactly one of phi0 | zeta | Omega/Y/Gamma");
    }

    if (root.contains("integrator")) {
        const json& integ = root["integrator"];
        check_keys(origin, integ, "integrator", {"method", "dt", "t_end"});
        const std::string method = integ.value("method", "rk4");
        if (method == "rk4")
            s.method = sim::Method::kRk4;
        else if (method == "rk45")
            s.method = sim::Method::kRk45;
        else
            fail(origin, "unknown integrator method '" + method + "' (rk4 | rk45)");
        if (integ.contains("dt")) s.dt = need_number(origin, integ, "integrator", "dt");
        if (integ.contains("t_end")) s.t_end = need_number(origin, integ, "integrator", "t_end");
    }
    if (!(s.dt > 0.0)) fail(origin, "integrator.dt must be positive");
    if (!(s.t_end > 0.0)) fail(origin, "integrator.t_end must be positive");

    if (root.contains("outputs")) {
        if (!root["outputs"].is_array()) fail(origin, "'outputs' must be an array");
        for (const json& o : root["outputs"]) {
            check_keys(origin, o, "outputs[]", {"csv", "columns"});
            OutputSpec spec;
            if (!o.contains("csv") || !o["csv"].is_string())
                fail(origin, "outputs[] entries need a 'csv' path");
            spec.csv_path = o["csv"].get<std::string>();
            if (o.contains("columns")) {
                if (!o["columns"].is_array()) fail(origin, "outputs[].columns must be an array");
                for (const json& c : o["columns"]) spec.columns.push_back(c.get<std::string>());
            }
            s.outputs.push_back(std::move(spec));
        }
    }

    if (root.contains("equilibrium")) {
        const json& eq = root["equilibrium"];
        check_keys(origin, eq, "equilibrium", {"kind", "Y0", "Omega0", "zeta"});
        EquilibriumSpec spec;
        const std::string kind = eq.value("kind", "sliding");
        if (kind == "sliding") {
            spec.kind = EquilibriumSpec::Kind::kSliding;
            if (eq.contains("Y0")) spec.Y0 = need_number(origin, eq, "equilibrium", "Y0");
        } else if (kind == "spinning") {
            spec.kind = EquilibriumSpec::Kind::kSpinning;
            spec.Omega0 = need_number(origin, eq, "equilibrium", "Omega0");
        } else if (kind == "custom") {
            spec.kind = EquilibriumSpec::Kind::kCustom;
            spec.zeta = need_array<5>(origin, eq, "equilibrium", "zeta");
        } else {
            fail(origin, "unknown equilibrium kind '" + kind + "'");
        }
        s.equilibrium = spec;
    }
    return s;
}

Scenario parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
}

std::string serialize(const Scenario& s) {
    json root;
    switch (s.model) {
        case ModelKind::kSkate: root["model"] = "skate"; break;
        case ModelKind::kSkateRotor: root["model"] = "skate_rotor"; break;
        case ModelKind::kVeselova: root["model"] = "veselova"; break;
    }
    json params;
    if (s.model == ModelKind::kVeselova) {
        params["I"] = {s.vI1, s.vI2, s.vI3};
        if (s.potential.type == PotentialSpec::Type::kLinear) {
            params["potential"] = {
                {"type", "linear"},
                {"direction", {s.potential.direction.x, s.potential.direction.y,
                               s.potential.direction.z}},
                {"strength", s.potential.strength}};
        }
    } else {
        params["m"] = s.skate.m;
        params["l"] = s.skate.l;
        params["g"] = s.skate.g;
        params["I"] = {s.skate.I1, s.skate.I2, s.skate.I3};
        if (s.model == ModelKind::kSkateRotor) params["J"] = {s.J1, s.J2, s.J3};
    }
    root["params"] = params;

    if (s.model != ModelKind::kVeselova) {
        json ctl;
        ctl["mode"] = s.control_mode == ControlMode::kMatched ? "matched" : "off";
        if (s.control_mode == ControlMode::kMatched) ctl["sigma"] = s.sigma;
        if (s.rho_override) ctl["rho"] = *s.rho_override;
        if (s.theta_dot0) ctl["theta_dot0"] = *s.theta_dot0;
        if (s.model == ModelKind::kSkateRotor || s.control_mode == ControlMode::kMatched)
            root["control"] = ctl;
    }

    json init;
    if (s.model == ModelKind::kVeselova) {
        const auto& a = *s.vz0;
        init["Omega"] = {a[0], a[1], a[2]};
        init["Gamma"] = {a[3], a[4], a[5]};
    } else if (s.phi0) {
        init["phi0"] = *s.phi0;
    } else if (s.zeta0) {
        init["zeta"] = *s.zeta0;
    } else if (s.full0) {
        const auto& a = *s.full0;
        init["Omega"] = {a[0], a[1], a[2]};
        init["Y"] = {a[3], a[4], a[5]};
        init["Gamma"] = {a[6], a[7], a[8]};
    }
    root["initial"] = init;

    root["integrator"] = {{"method", s.method == sim::Method::kRk45 ? "rk45" : "rk4"},
                          {"dt", s.dt},
                          {"t_end", s.t_end}};
    if (!s.outputs.empty()) {
        json outs = json::array();
        for (const OutputSpec& o : s.outputs) {
            json j;
            j["csv"] = o.csv_path;
            if (!o.columns.empty()) j["columns"] = o.columns;
            outs.push_back(j);
        }
        root["outputs"] = outs;
    }
    if (s.equilibrium) {
        json eq;
        switch (s.equilibrium->kind) {
            case EquilibriumSpec::Kind::kSliding:
                eq["kind"] = "sliding";
                eq["Y0"] = s.equilibrium->Y0;
                break;
            case EquilibriumSpec::Kind::kSpinning:
                eq["kind"] = "spinning";
                eq["Omega0"] = s.equilibrium->Omega0;
                break;
            case EquilibriumSpec::Kind::kCustom:
                eq["kind"] = "custom";
                eq["zeta"] = s.equilibrium->zeta;
                break;
        }
        root["equilibrium"] = eq;
    }
    return root.dump(2) + "\n";
}

}  // namespace nhep::scenario
