#include "phgrasp/models.hpp"

#include <cmath>

namespace phgrasp {

double gripper_stiffness(const GripperModel& g, double q) {
    const double e = q - g.c_g;
    const double sign = g.flip_branch ? -1.0 : 1.0;
    return 0.5 * (g.k_g1 + g.k_g2) +
           sign * 0.5 * (g.k_g1 - g.k_g2) * e / std::sqrt(g.alpha_f + e * e);
}

double gripper_potential(const GripperModel& g, double q) {
    const double e = q - g.c_g;
    const double r = std::sqrt(g.alpha_f + e * e);
    const double dk = g.flip_branch ? -(g.k_g1 - g.k_g2) : (g.k_g1 - g.k_g2);
    // Antiderivative of K_g(q)(q - c_g) normalized so V(c_g) = 0. The odd
    // terms carry coefficient 1/4 (and alpha_f/4): with 1/2 the derivative
    // would double the smooth-step contribution and disagree with K_g.
    return 0.25 * (g.k_g1 + g.k_g2) * e * e +
           0.25 * g.alpha_f * dk * std::log(std::sqrt(g.alpha_f)) +
           0.25 * dk * e * r -
           0.25 * g.alpha_f * dk * std::log(e + r);
}

double gripper_potential_grad(const GripperModel& g, double q) {
    return gripper_stiffness(g, q) * (q - g.c_g);
}

MechanicalPHSystem gripper_system(const GripperModel& g) {
    require(g.k_g1 > 0 && g.k_g2 > 0 && g.m_g > 0 && g.alpha_f > 0,
            "gripper_system: k_g1, k_g2, m_g, alpha_f must be positive");
    require(g.d_g >= 0, "gripper_system: d_g must be nonnegative");
    return make_system(
        1,
        [m = g.m_g](const Vec&) { return Mat::Constant(1, 1, m); },
        [g](const Vec& q) { return gripper_potential(g, q[0]); },
        [g](const Vec& q) { return Vec::Constant(1, gripper_potential_grad(g, q[0])); },
        [d = g.d_g](const Vec&, const Vec&) { return Mat::Constant(1, 1, d); },
        [](const Vec&) { return Mat::Identity(1, 1); },
        [](const Vec&) { return Mat::Identity(1, 1); });
}

MechanicalPHSystem compliant_system(const CompliantBody& c) {
    require(c.m_c > 0 && c.K_c > 0, "compliant_system: m_c, K_c must be positive");
    require(c.d_c >= 0, "compliant_system: d_c must be nonnegative");
    return make_system(
        1,
        [m = c.m_c](const Vec&) { return Mat::Constant(1, 1, m); },
        [c](const Vec& q) { return 0.5 * c.K_c * (q[0] - c.q_c) * (q[0] - c.q_c); },
        [c](const Vec& q) { return Vec::Constant(1, c.K_c * (q[0] - c.q_c)); },
        [d = c.d_c](const Vec&, const Vec&) { return Mat::Constant(1, 1, d); },
        [](const Vec&) { return Mat::Identity(1, 1); },
        [](const Vec&) { return Mat::Identity(1, 1); });
}

bool update_engagement(const ContactCoupling& cpl, bool engaged, double q) {
    if (!engaged) return q <= cpl.engage_position;
    return !(q > cpl.engage_position + cpl.hysteresis);
}

ContactForces contact_force(const ContactCoupling& cpl, bool engaged,
                            double q, double qdot, double y_c) {
    ContactForces f;
    if (!engaged) return f;
    if (cpl.mode == ContactMode::Rigid) {
        const double delta = cpl.engage_position - q;  // penetration depth
        if (delta > 0.0) {
            f.f_e = std::max(0.0, cpl.rigid_stiffness * delta - cpl.rigid_damping * qdot);
        }
    } else {
        f.f_e = -y_c;
        f.u_c = qdot;  // y_g of the gripper
    }
    return f;
}

}  // namespace phgrasp
