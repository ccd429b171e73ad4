#pragma once

// Concrete study models: the 1-DOF gripper with smoothed bimodal stiffness,
// the compliant (mass-spring-damper) body, and the contact couplings.

#include "phgrasp/ph_system.hpp"

namespace phgrasp {

struct GripperModel {
    double m_g = 0.5;
    double d_g = 0.1;
    double k_g1 = 0.21;
    double k_g2 = 0.06;
    double c_g = 0.3;
    double alpha_f = 0.001;
    // Flips the orientation of the smooth stiffness step (which branch is
    // approached as q → ±∞). Off by default: the smooth formula is used
    // verbatim, K_g → k_g1 as q → +∞.
    bool flip_branch = false;
};

// K_g(q) = ½(k_g1+k_g2) + ½(k_g1−k_g2)(q−c_g)/√(α_f+(q−c_g)²)
double gripper_stiffness(const GripperModel& g, double q);

// Closed-form potential with dV/dq = K_g(q)(q−c_g); V(c_g) = 0.
double gripper_potential(const GripperModel& g, double q);
double gripper_potential_grad(const GripperModel& g, double q);

// 1-DOF PH system: M = m_g, D = d_g, G = B = 1, V as above.
MechanicalPHSystem gripper_system(const GripperModel& g);

struct CompliantBody {
    double m_c = 0.1;
    double d_c = 0.1;
    double K_c = 0.1;
    double q_c = 0.3;
};

// 1-DOF PH system with V_c(q) = ½K_c(q−q_c)², G = 1, output y_c = p/m_c.
MechanicalPHSystem compliant_system(const CompliantBody& c);

enum class ContactMode { Rigid, Compliant };

struct ContactCoupling {
    ContactMode mode = ContactMode::Rigid;
    // Gripper coordinate at which the tip meets the object surface;
    // contact is engaged while q ≤ engage_position (with hysteresis).
    double engage_position = 0.2;
    double rigid_stiffness = 50.0;  // k_wall (rigid mode)
    double rigid_damping = 1.0;     // d_wall (rigid mode)
    double hysteresis = 1e-4;
};

// Engagement state machine, resolved at step boundaries.
bool update_engagement(const ContactCoupling& cpl, bool engaged, double q);

struct ContactForces {
    double f_e = 0.0;  // external force on the gripper
    double u_c = 0.0;  // input to the compliant body (compliant mode only)
};

// Rigid: penalty force k_wall·δ − d_wall·q̇ (clipped at 0, no adhesion) on
// penetration δ = engage_position − q > 0.
// Compliant (engaged): power-preserving interconnection f_e = −y_c, u_c = y_g.
ContactForces contact_force(const ContactCoupling& cpl, bool engaged,
                            double q, double qdot,
                            double y_c);

}  // namespace phgrasp
