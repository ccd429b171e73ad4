#include "phgrasp/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace phgrasp {

using nlohmann::json;

// q_f = K_p⁻¹ f_d (Hogan scenarios mirror K_Hp into rest_length.K_p at load).
double Scenario::q_f() const { return f_d / rest_length.K_p; }

void Scenario::validate() const {
    require(gripper.m_g > 0 && gripper.k_g1 > 0 && gripper.k_g2 > 0 &&
                gripper.alpha_f > 0,
            "scenario: gripper m_g, k_g1, k_g2, alpha_f must be positive");
    require(gripper.d_g >= 0, "scenario: gripper d_g must be nonnegative");
    require(rest_length.K_p > 0 && rest_length.K_rl > 0 && rest_length.C > 0,
            "scenario: rest-length gains must be positive");
    require(hogan.K_Hp > 0 && hogan.K_Hd > 0, "scenario: Hogan gains must be positive");
    require(integrator.dt > 0, "scenario: dt must be positive");
    require(integrator.t_end >= 0, "scenario: t_end must be nonnegative");
    if (integrator.method == IntegrationMethod::RK4)
        require(integrator.dt <= 0.005, "scenario: dt must be <= 0.005 s for rk4");
    if (object_mode == ContactMode::Rigid)
        require(coupling.rigid_stiffness > 0 && coupling.rigid_damping > 0,
                "scenario: rigid penalty parameters must be positive");
    if (object_mode == ContactMode::Compliant)
        require(compliant.m_c > 0 && compliant.K_c > 0 && compliant.d_c >= 0,
                "scenario: compliant body parameters invalid");
    require(zoh_period >= 0, "scenario: zoh_period must be nonnegative");
    // f_d and q_f are consistent by construction (q_f = f_d / K_p); the
    // residual check guards externally supplied q_f values.
    const double residual = std::abs(rest_length.K_p * q_f() - f_d);
    require(residual <= 1e-9, "scenario: f_d and q_f inconsistent via K_p");
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ContractViolation("scenario: unknown key '" + where + it.key() + "'");
    }
}

double num(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number())
        throw ContractViolation("scenario: field '" + key + "' must be a number");
    return j.at(key).get<double>();
}

}  // namespace

Scenario scenario_from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ContractViolation(std::string("scenario: parse error: ") + e.what());
    }
    if (!j.is_object()) throw ContractViolation("scenario: top level must be an object");

    check_keys(j,
               {"name", "gripper", "object", "controller", "f_d", "q_f", "initial",
                "integrator", "zoh_period"},
               "");

    Scenario sc;
    sc.name = j.value("name", std::string("scenario"));

    if (j.contains("gripper")) {
        const json& g = j.at("gripper");
        check_keys(g, {"m_g", "d_g", "k_g1", "k_g2", "c_g", "alpha_f", "flip_branch"},
                   "gripper.");
        sc.gripper.m_g = num(g, "m_g", sc.gripper.m_g);
        sc.gripper.d_g = num(g, "d_g", sc.gripper.d_g);
        sc.gripper.k_g1 = num(g, "k_g1", sc.gripper.k_g1);
        sc.gripper.k_g2 = num(g, "k_g2", sc.gripper.k_g2);
        sc.gripper.c_g = num(g, "c_g", sc.gripper.c_g);
        sc.gripper.alpha_f = num(g, "alpha_f", sc.gripper.alpha_f);
        sc.gripper.flip_branch = g.value("flip_branch", false);
    }

    if (!j.contains("object"))
        throw ContractViolation("scenario: missing 'object' section");
    {
        const json& o = j.at("object");
        check_keys(o,
                   {"type", "engage_position", "k_wall", "d_wall", "m_c", "d_c", "K_c",
                    "q_c"},
                   "object.");
        const std::string type = o.value("type", std::string());
        if (type == "rigid") {
            sc.object_mode = ContactMode::Rigid;
            sc.coupling.mode = ContactMode::Rigid;
            sc.coupling.rigid_stiffness = num(o, "k_wall", 50.0);
            sc.coupling.rigid_damping = num(o, "d_wall", 1.0);
        } else if (type == "compliant") {
            sc.object_mode = ContactMode::Compliant;
            sc.coupling.mode = ContactMode::Compliant;
            sc.compliant.m_c = num(o, "m_c", 0.1);
            sc.compliant.d_c = num(o, "d_c", 0.1);
            sc.compliant.K_c = num(o, "K_c", 0.1);
            sc.compliant.q_c = num(o, "q_c", 0.3);
        } else {
            throw ContractViolation("scenario: object.type must be rigid or compliant");
        }
        sc.coupling.engage_position = num(o, "engage_position", 0.2);
    }

    if (!j.contains("controller"))
        throw ContractViolation("scenario: missing 'controller' section");
    {
        const json& c = j.at("controller");
        check_keys(c,
                   {"type", "K_p", "K_rl", "C", "q_rl0", "factor", "K_Hp", "K_Hd",
                    "compensate_external"},
                   "controller.");
        const std::string type = c.value("type", std::string());
        if (type == "rest_length") {
            sc.controller = ControllerKind::RestLength;
            sc.rest_length.K_p = num(c, "K_p", 1.0);
            sc.rest_length.K_rl = num(c, "K_rl", 0.5);
            sc.rest_length.C = num(c, "C", 3.0);
            sc.rest_length.q_rl0 = num(c, "q_rl0", 0.0);
            const std::string factor = c.value("factor", std::string("unit"));
            if (factor == "unit")
                sc.rest_length.factor = FactorConvention::Unit;
            else if (factor == "cholesky")
                sc.rest_length.factor = FactorConvention::Cholesky;
            else
                throw ContractViolation(
                    "scenario: controller.factor must be unit or cholesky");
        } else if (type == "hogan") {
            sc.controller = ControllerKind::Hogan;
            sc.hogan.K_Hp = num(c, "K_Hp", 1.0);
            sc.hogan.K_Hd = num(c, "K_Hd", 3.0);
            sc.hogan.compensate_external = c.value("compensate_external", false);
            sc.rest_length.K_p = num(c, "K_Hp", 1.0);  // q_f = f_d / K_Hp (= K_p)
        } else {
            throw ContractViolation(
                "scenario: controller.type must be rest_length or hogan");
        }
    }

    sc.f_d = num(j, "f_d", 0.2);
    if (j.contains("q_f")) {
        const double qf_given = j.at("q_f").get<double>();
        const double residual = std::abs(sc.rest_length.K_p * qf_given - sc.f_d);
        if (residual > 1e-9)
            throw ContractViolation(
                "scenario: q_f inconsistent with f_d via K_p (residual " +
                std::to_string(residual) + ")");
    }

    if (j.contains("initial")) {
        const json& ic = j.at("initial");
        check_keys(ic, {"q", "p"}, "initial.");
        sc.q0 = num(ic, "q", 0.3);
        sc.p0 = num(ic, "p", 0.0);
    }

    if (j.contains("integrator")) {
        const json& ig = j.at("integrator");
        check_keys(ig, {"method", "dt", "t_end"}, "integrator.");
        const std::string method = ig.value("method", std::string("rk4"));
        if (method == "rk4")
            sc.integrator.method = IntegrationMethod::RK4;
        else if (method == "semi-implicit-euler")
            sc.integrator.method = IntegrationMethod::SemiImplicitEuler;
        else
            throw ContractViolation(
                "scenario: integrator.method must be rk4 or semi-implicit-euler");
        sc.integrator.dt = num(ig, "dt", 1e-3);
        sc.integrator.t_end = num(ig, "t_end", 3.0);
    } else {
        sc.integrator.t_end = sc.object_mode == ContactMode::Rigid ? 3.0 : 4.0;
    }

    sc.zoh_period = num(j, "zoh_period", 0.0);
    sc.validate();
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractViolation("scenario: cannot open file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    if (buf.str().empty()) throw ContractViolation("scenario: empty file " + path);
    return scenario_from_json_string(buf.str());
}

std::string scenario_to_json_string(const Scenario& sc) {
    json j;
    j["name"] = sc.name;
    j["gripper"] = {{"m_g", sc.gripper.m_g},     {"d_g", sc.gripper.d_g},
                    {"k_g1", sc.gripper.k_g1},   {"k_g2", sc.gripper.k_g2},
                    {"c_g", sc.gripper.c_g},     {"alpha_f", sc.gripper.alpha_f},
                    {"flip_branch", sc.gripper.flip_branch}};
    if (sc.object_mode == ContactMode::Rigid) {
        j["object"] = {{"type", "rigid"},
                       {"engage_position", sc.coupling.engage_position},
                       {"k_wall", sc.coupling.rigid_stiffness},
                       {"d_wall", sc.coupling.rigid_damping}};
    } else {
        j["object"] = {{"type", "compliant"},
                       {"engage_position", sc.coupling.engage_position},
                       {"m_c", sc.compliant.m_c},
                       {"d_c", sc.compliant.d_c},
                       {"K_c", sc.compliant.K_c},
                       {"q_c", sc.compliant.q_c}};
    }
    if (sc.controller == ControllerKind::RestLength) {
        j["controller"] = {
            {"type", "rest_length"},
            {"K_p", sc.rest_length.K_p},
            {"K_rl", sc.rest_length.K_rl},
            {"C", sc.rest_length.C},
            {"q_rl0", sc.rest_length.q_rl0},
            {"factor",
             sc.rest_length.factor == FactorConvention::Unit ? "unit" : "cholesky"}};
    } else {
        j["controller"] = {{"type", "hogan"},
                           {"K_Hp", sc.hogan.K_Hp},
                           {"K_Hd", sc.hogan.K_Hd},
                           {"compensate_external", sc.hogan.compensate_external}};
    }
    j["f_d"] = sc.f_d;
    j["initial"] = {{"q", sc.q0}, {"p", sc.p0}};
    j["integrator"] = {{"method", sc.integrator.method == IntegrationMethod::RK4
                                      ? "rk4"
                                      : "semi-implicit-euler"},
                       {"dt", sc.integrator.dt},
                       {"t_end", sc.integrator.t_end}};
    j["zoh_period"] = sc.zoh_period;
    return j.dump(2) + "\n";
}

void save_scenario(const Scenario& sc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ContractViolation("scenario: cannot open file for writing " + path);
    out << scenario_to_json_string(sc);
}

std::vector<std::string> preset_names() {
    return {"rigid_restlength",     "rigid_hogan_fe",     "rigid_hogan",
            "compliant_restlength", "compliant_hogan_fe", "compliant_hogan"};
}

Scenario preset_scenario(const std::string& name) {
    Scenario sc;
    sc.name = name;
    const bool rigid = name.rfind("rigid", 0) == 0;
    const bool compliant = name.rfind("compliant", 0) == 0;
    if (!rigid && !compliant)
        throw ContractViolation("unknown preset: " + name);

    if (rigid) {
        sc.object_mode = ContactMode::Rigid;
        sc.coupling.mode = ContactMode::Rigid;
        // Wall surface sits one steady-state compression (f_d / k_wall =
        // 0.004) past the grasp position so the equilibrium force equals f_d.
        sc.coupling.engage_position = 0.204;
        sc.integrator.t_end = 3.0;
    } else {
        sc.object_mode = ContactMode::Compliant;
        sc.coupling.mode = ContactMode::Compliant;
        sc.coupling.engage_position = 0.2;
        sc.compliant = CompliantBody{};
        sc.integrator.t_end = 4.0;
    }

    if (name == "rigid_restlength") {
        sc.controller = ControllerKind::RestLength;
        sc.rest_length = {1.0, 0.5, 3.0, 0.0, FactorConvention::Unit};
    } else if (name == "compliant_restlength") {
        sc.controller = ControllerKind::RestLength;
        sc.rest_length = {1.0, 0.25, 1.5, 0.0, FactorConvention::Unit};
    } else if (name == "rigid_hogan_fe" || name == "compliant_hogan_fe") {
        sc.controller = ControllerKind::Hogan;
        sc.hogan = {1.0, 3.0, true};
    } else if (name == "rigid_hogan" || name == "compliant_hogan") {
        sc.controller = ControllerKind::Hogan;
        sc.hogan = {1.0, 3.0, false};
    } else {
        throw ContractViolation("unknown preset: " + name);
    }
    sc.validate();
    return sc;
}

}  // namespace phgrasp
