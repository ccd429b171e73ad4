#pragma once

// Fixed-step integration of the coupled plant–controller–object system with
// energy / Lyapunov monitors and full trajectory recording.

#include "phgrasp/controller.hpp"
#include "phgrasp/record.hpp"
#include "phgrasp/scenario.hpp"

namespace phgrasp {

// Full simulation state advanced by one step: gripper (q,p), rest-length
// q_rl (rest-length controller only), compliant object (q_obj, p_obj),
// plus the engagement flag resolved at step boundaries.
struct StateBundle {
    double t = 0.0;
    double q = 0.0;
    double p = 0.0;
    double q_rl = 0.0;
    double q_obj = 0.0;
    double p_obj = 0.0;
    bool engaged = false;
};

// Assembled, ready-to-run scenario (plant systems + controller instances).
struct SimSession {
    Scenario scenario;
    MechanicalPHSystem plant;
    MechanicalPHSystem object;  // compliant body (unused in rigid mode)
    RestLengthController rest_length;  // valid when controller == RestLength
    HoganController hogan;             // valid when controller == Hogan
    bool has_rest_length = false;
};

SimSession make_session(const Scenario& sc);

// Advances the bundle one step (engagement frozen during the step, re-resolved
// at the boundary). The controller is re-evaluated at every RK4 sub-stage
// unless a zero-order-hold control value is supplied.
StateBundle step(const SimSession& session, const StateBundle& s, double dt,
                 const double* zoh_control = nullptr);

// Executes the whole scenario, evaluating monitors and recording every step.
// Throws NumericalError on divergence (NaN or runaway state).
RunRecord run(const Scenario& sc);

struct Metrics {
    bool contact = false;
    double contact_time = 0.0;
    double impact_force = 0.0;
    bool settled = false;
    double settling_time = 0.0;
    double steady_state_error = 0.0;
};

// contact_time: first engagement instant; impact: max |f_e| within `window`
// seconds after contact; settling: first t after which |f_e − f_d| ≤ band
// forever; steady-state error: |f_e(t_end) − f_d|.
Metrics compute_metrics(const RunRecord& rec, double f_d, double window = 0.2,
                        double band = 0.02);

std::string metrics_to_string(const Metrics& m);

}  // namespace phgrasp
