#pragma once

// Scenario: the unit the CLI executes — plant + object + controller +
// integrator settings. Serialized as JSON (see README for the schema).

#include <optional>
#include <string>

#include "phgrasp/models.hpp"

namespace phgrasp {

enum class IntegrationMethod { RK4, SemiImplicitEuler };

struct IntegratorConfig {
    IntegrationMethod method = IntegrationMethod::RK4;
    double dt = 1e-3;
    double t_end = 3.0;
};

enum class ControllerKind { RestLength, Hogan };

// Factor convention used by the rest-length controller's transform:
// Unit (T ≡ I) is the constant-mass specialization the 1-DOF study uses;
// Cholesky is the general mass-normalizing transform.
enum class FactorConvention { Unit, Cholesky };

struct RestLengthSpec {
    double K_p = 1.0;
    double K_rl = 0.5;
    double C = 3.0;
    double q_rl0 = 0.0;
    FactorConvention factor = FactorConvention::Unit;
};

struct HoganSpec {
    double K_Hp = 1.0;
    double K_Hd = 3.0;
    bool compensate_external = false;
};

struct Scenario {
    std::string name = "scenario";
    GripperModel gripper;

    ContactMode object_mode = ContactMode::Rigid;
    ContactCoupling coupling;   // engage position + rigid penalty parameters
    CompliantBody compliant;    // used when object_mode == Compliant

    ControllerKind controller = ControllerKind::RestLength;
    RestLengthSpec rest_length;
    HoganSpec hogan;

    double f_d = 0.2;  // desired grasp force; q_f = f_d / K_p
    double q0 = 0.3;
    double p0 = 0.0;

    IntegratorConfig integrator;
    double zoh_period = 0.0;  // 0 = continuous control

    double q_f() const;
    void validate() const;  // throws ContractViolation on bad config
};

// JSON (de)serialization; load rejects unknown keys and reports the offending
// field path. Throws ContractViolation on parse/validation errors.
Scenario load_scenario(const std::string& path);
Scenario scenario_from_json_string(const std::string& text);
std::string scenario_to_json_string(const Scenario& sc);
void save_scenario(const Scenario& sc, const std::string& path);

// Bundled presets mirroring the comparative study
// (names: rigid_restlength, rigid_hogan_fe, rigid_hogan,
//         compliant_restlength, compliant_hogan_fe, compliant_hogan).
Scenario preset_scenario(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace phgrasp
