#pragma once

// Generalized canonical transformation to identity mass-inertia coordinates:
//   q̄ = q − q_f,   p̄ = T(q)⁻¹ p   with   M(q) = T(q) T(q)ᵀ  (T lower-triangular)
// yielding  H̄(q̄,p̄) = ½ p̄ᵀp̄ + V̄(q̄)  and the transformed PH dynamics
//   [q̄̇; p̄̇] = [[0, T⁻ᵀ],[−T⁻¹, J̄₂−D̄]] ∇H̄ + [0; Ḡ] v + [0; B̄] f_e
// with D̄ = T⁻¹ D T⁻ᵀ, Ḡ = T⁻¹G, B̄ = T⁻¹B and the gyroscopic matrix
//   J̄₂ = [∂(T̄⁻¹p̄)/∂q̄] T̄⁻ᵀ − T̄⁻¹ [∂(T̄⁻¹p̄)/∂q̄]ᵀ.

#include "phgrasp/ph_system.hpp"

namespace phgrasp {

// Unique lower-triangular factor with positive diagonal such that L Lᵀ = M.
// Throws NumericalError naming the failing pivot index when M is not SPD.
Mat cholesky_factor(const Mat& M);

struct TransformedState {
    Vec qbar;
    Vec pbar;
};

struct TransformedSystem {
    MechanicalPHSystem base;  // owned copy; function fields are shared state-free closures
    std::function<Mat(const Vec&)> factor;  // q ↦ T(q), lower-triangular
    // (q̄, p̄) ↦ ∂(T̄(q̄)⁻¹ p̄)/∂q̄; defaults to central finite differences.
    std::function<Mat(const Vec&, const Vec&)> factor_state_jac;
    Vec q_f;
    // True when `factor` is the Cholesky factor of the base mass matrix
    // (so T Tᵀ = M holds); false for the unit-factor convention used by the
    // constant-mass controller specialization, where T ≡ I by design.
    bool factor_is_cholesky = true;
};

// Standard construction: T(q) = chol(M(q)).
TransformedSystem make_cholesky_transform(MechanicalPHSystem sys, const Vec& q_f);

// Constant-mass specialization convention: T ≡ I, so p̄ = p, D̄ = D, Ḡ = G,
// B̄ = B and J̄₂ = 0. This is how the scalar gripper control law is stated;
// it deliberately skips the mass normalization (T Tᵀ ≠ M unless M = I).
TransformedSystem make_unit_transform(MechanicalPHSystem sys, const Vec& q_f);

TransformedState to_transformed(const TransformedSystem& ts, const PlantState& s);
PlantState from_transformed(const TransformedSystem& ts, const TransformedState& xbar);

// J̄₂ as above, antisymmetrized after assembly: ½(A − Aᵀ).
Mat gyroscopic_matrix(const TransformedSystem& ts, const TransformedState& xbar);
// The raw assembled matrix before antisymmetrization (exposed for testing the
// derivative construction; must already be skew to ~1e-6).
Mat gyroscopic_matrix_raw(const TransformedSystem& ts, const TransformedState& xbar);

struct TransformedDerivative {
    Vec dqbar;
    Vec dpbar;
    Vec ybar;  // Ḡᵀ p̄
};

TransformedDerivative transformed_vector_field(const TransformedSystem& ts,
                                               const TransformedState& xbar,
                                               const Vec& v, const Vec& f_e);

// Convenience accessors (evaluated at q = q̄ + q_f, p = T p̄).
Mat factor_at(const TransformedSystem& ts, const Vec& qbar);
Mat dbar_at(const TransformedSystem& ts, const Vec& qbar, const Vec& pbar);
Mat gbar_at(const TransformedSystem& ts, const Vec& qbar);
Mat bbar_at(const TransformedSystem& ts, const Vec& qbar);
Vec vbar_grad_at(const TransformedSystem& ts, const Vec& qbar);  // ∂V̄/∂q̄

double transformed_hamiltonian(const TransformedSystem& ts, const TransformedState& xbar);

}  // namespace phgrasp
