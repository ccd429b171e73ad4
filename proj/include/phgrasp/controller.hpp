#pragma once

// Variable rest-length impedance grasping controller and the classical
// Hogan impedance baselines.
//
// Rest-length controller (stated in transformed coordinates):
//   p̂    = p̄ + T(q̄)ᵀ K_p (q̄ − q_rl)
//   ŷ    = Ḡ(q̄)ᵀ p̂
//   q̇_rl = −ŷ − K_p (q̄ − q_rl) − K_rl q_rl
//   v    = Ḡ⁻¹ [ T⁻¹ ∂H̄/∂q̄ + Ḡ K_rl q_rl − B̄ f_e
//                + (Ḡ T⁻ᵀ − T⁻ᵀ + J̄₂ − D̄) Tᵀ K_p (q̄ − q_rl)
//                − Tᵀ K_p (q̄̇ − q̇_rl) − Ṫᵀ K_p (q̄ − q_rl) ] − C ŷ
// with candidate storage function
//   Ĥ = ½ p̂ᵀp̂ + ½ (q̄−q_rl)ᵀ K_p (q̄−q_rl) + ½ q_rlᵀ K_rl q_rl.

#include "phgrasp/transform.hpp"

namespace phgrasp {

struct RestLengthController {
    Mat K_p;   // SPD
    Mat K_rl;  // SPD
    Mat C;     // SPD
    Vec q_f;
    Vec q_rl;  // rest-length state, integrated alongside the plant
    TransformedSystem transformed;
};

RestLengthController make_rest_length_controller(TransformedSystem transformed,
                                                 Mat K_p, Mat K_rl, Mat C,
                                                 Vec q_rl0);

// q_f = K_p⁻¹ f_d
Vec desired_force_to_target(const Mat& K_p, const Vec& f_d);

// f_d = 𝒥(q_f)ᵀ F_d; callers cross-check against K_p q_f.
Vec workspace_desired_force(const GeometricJacobian& jac, const Vec& q_f, const Vec& F_d);

Vec adapted_momentum(const RestLengthController& ctrl, const TransformedState& xbar);
Vec passive_output(const RestLengthController& ctrl, const TransformedState& xbar);
Vec rest_length_derivative(const RestLengthController& ctrl, const TransformedState& xbar);

struct RestLengthPort {
    Vec u_rl;  // q̇_rl
    Vec y_rl;  // Ḡᵀ (K_p(q̄−q_rl) + K_rl q_rl)
};
RestLengthPort rest_length_port(const RestLengthController& ctrl, const TransformedState& xbar);

Vec control_law(const RestLengthController& ctrl, const TransformedState& xbar, const Vec& f_e);

// Candidate storage function Ĥ(q̄, p̂, q_rl) (quadratic form above).
double storage_function(const RestLengthController& ctrl, const TransformedState& xbar);

// Block-diagonal power-balance form U = blockdiag(K_p K_p, D̄ + Ḡ C Ḡᵀ, I)
// evaluated at the given state; z = (q̄−q_rl, p̂, K_p(q̄−q_rl)+K_rl q_rl).
Mat power_balance_form(const RestLengthController& ctrl, const TransformedState& xbar);
Vec power_balance_z(const RestLengthController& ctrl, const TransformedState& xbar);

// D̃ = −J̄₂ + D̄ + Ḡ C Ḡᵀ, the (p̂,p̂) dissipation block of the closed loop.
Mat closed_loop_dissipation(const RestLengthController& ctrl, const TransformedState& xbar);

// Classical Hogan impedance law:
//   ū = D(q,q̇)q̇ + ∂V/∂q − K_Hp (q − q_f) − K_Hd (q̇ − q̇_f)
//   u = ū − f_e  when compensate_external is set.
struct HoganController {
    Mat K_Hp;  // SPD
    Mat K_Hd;  // SPD
    Vec q_f;
    Vec qdot_f;
    bool compensate_external = false;
};

HoganController make_hogan_controller(Mat K_Hp, Mat K_Hd, Vec q_f, Vec qdot_f,
                                      bool compensate_external);

Vec hogan_control(const HoganController& ctrl, const MechanicalPHSystem& sys,
                  const PlantState& s, const Vec& f_e);

}  // namespace phgrasp
