#pragma once

// Forced mechanical port-Hamiltonian systems:
//   q̇ = M(q)⁻¹ p
//   ṗ = −∂H/∂q − D(q,p) M(q)⁻¹ p + G(q) u + B(q) f_e
//   y  = G(q)ᵀ M(q)⁻¹ p
// where ∂H/∂q = ∂V/∂q + ∂(½pᵀM(q)⁻¹p)/∂q (the kinetic term vanishes for
// constant mass).
// with Hamiltonian H(q,p) = ½ pᵀ M(q)⁻¹ p + V(q).

#include "phgrasp/common.hpp"

namespace phgrasp {

struct PlantState {
    Vec q;
    Vec p;
    double t = 0.0;
};

struct MechanicalPHSystem {
    int n = 0;
    std::function<Mat(const Vec&)> mass;                 // q ↦ M(q), SPD
    std::function<double(const Vec&)> potential;         // q ↦ V(q)
    std::function<Vec(const Vec&)> potential_grad;       // q ↦ ∂V/∂q
    std::function<Mat(const Vec&, const Vec&)> damping;  // (q,p) ↦ D(q,p), PSD
    std::function<Mat(const Vec&)> input_map;            // q ↦ G(q), invertible
    std::function<Mat(const Vec&)> ext_force_map;        // q ↦ B(q), default I
    // True when potential_grad is the built-in finite-difference fallback;
    // propagated into run metadata so consumers can see it.
    bool grad_is_finite_difference = false;
};

inline constexpr double kDampingPsdTolerance = 1e-9;

// Builds a system, filling in defaults (B = I, finite-difference gradient when
// no analytic one is supplied) and validating the function fields are present.
MechanicalPHSystem make_system(int n,
                               std::function<Mat(const Vec&)> mass,
                               std::function<double(const Vec&)> potential,
                               std::function<Vec(const Vec&)> potential_grad,
                               std::function<Mat(const Vec&, const Vec&)> damping,
                               std::function<Mat(const Vec&)> input_map,
                               std::function<Mat(const Vec&)> ext_force_map = nullptr);

// Spot-checks the type invariants (M SPD, D symmetric PSD up to tolerance,
// gradient consistent with finite differences) at the given sample points.
void validate_system(const MechanicalPHSystem& sys, const std::vector<Vec>& q_samples,
                     double grad_rel_tol = 1e-5);

double hamiltonian(const MechanicalPHSystem& sys, const PlantState& s);

struct PlantDerivative {
    Vec dq;
    Vec dp;
    Vec y;  // passive output Gᵀ M⁻¹ p
};

PlantDerivative plant_vector_field(const MechanicalPHSystem& sys, const PlantState& s,
                                   const Vec& u, const Vec& f_e);

// Work-space force mapping through the transpose of a geometric Jacobian
// (N = 3 or 6 rows of stacked linear/angular blocks).
struct GeometricJacobian {
    int N = 6;
    std::function<Mat(const Vec&)> jac;  // q ↦ 𝒥(q), N×n
};

Vec map_workspace_force(const GeometricJacobian& jac, const Vec& q, const Vec& F_e);

}  // namespace phgrasp
