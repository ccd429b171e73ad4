#include "phgrasp/ph_system.hpp"

#include <vector>

namespace phgrasp {

MechanicalPHSystem make_system(int n,
                               std::function<Mat(const Vec&)> mass,
                               std::function<double(const Vec&)> potential,
                               std::function<Vec(const Vec&)> potential_grad,
                               std::function<Mat(const Vec&, const Vec&)> damping,
                               std::function<Mat(const Vec&)> input_map,
                               std::function<Mat(const Vec&)> ext_force_map) {
    require(n > 0, "make_system: n must be positive");
    require(static_cast<bool>(mass), "make_system: mass function required");
    require(static_cast<bool>(potential), "make_system: potential function required");
    require(static_cast<bool>(damping), "make_system: damping function required");
    require(static_cast<bool>(input_map), "make_system: input_map function required");

    MechanicalPHSystem sys;
    sys.n = n;
    sys.mass = std::move(mass);
    sys.potential = std::move(potential);
    sys.damping = std::move(damping);
    sys.input_map = std::move(input_map);
    if (ext_force_map) {
        sys.ext_force_map = std::move(ext_force_map);
    } else {
        sys.ext_force_map = [n](const Vec&) { return Mat::Identity(n, n); };
    }
    if (potential_grad) {
        sys.potential_grad = std::move(potential_grad);
        sys.grad_is_finite_difference = false;
    } else {
        auto pot = sys.potential;
        sys.potential_grad = [pot](const Vec& q) {
            return finite_difference_gradient(pot, q);
        };
        sys.grad_is_finite_difference = true;
    }
    return sys;
}

void validate_system(const MechanicalPHSystem& sys, const std::vector<Vec>& q_samples,
                     double grad_rel_tol) {
    for (const Vec& q : q_samples) {
        require(q.size() == sys.n, "validate_system: sample dimension mismatch");
        const Mat M = sys.mass(q);
        require(M.rows() == sys.n && M.cols() == sys.n,
                "validate_system: mass matrix has wrong shape");
        if (!is_symmetric(M) || min_eigenvalue_sym(M) <= 0.0)
            throw NumericalError("validate_system: mass matrix not SPD at a sample");

        const Mat D = sys.damping(q, Vec::Zero(sys.n));
        if (!is_symmetric(D) || min_eigenvalue_sym(D) < -kDampingPsdTolerance)
            throw NumericalError("validate_system: damping matrix not PSD at a sample");

        const Vec g = sys.potential_grad(q);
        const Vec g_fd = finite_difference_gradient(sys.potential, q);
        const double scale = std::max(1.0, g_fd.cwiseAbs().maxCoeff());
        if ((g - g_fd).cwiseAbs().maxCoeff() > grad_rel_tol * scale)
            throw NumericalError(
                "validate_system: potential_grad disagrees with finite differences");
    }
}

double hamiltonian(const MechanicalPHSystem& sys, const PlantState& s) {
    require(s.q.size() == sys.n && s.p.size() == sys.n,
            "hamiltonian: state dimension mismatch");
    require(all_finite(s.q) && all_finite(s.p), "hamiltonian: non-finite state");
    const Mat M = sys.mass(s.q);
    Eigen::LLT<Mat> llt(M);
    if (llt.info() != Eigen::Success)
        throw NumericalError("hamiltonian: singular or indefinite mass matrix");
    const Vec Minv_p = llt.solve(s.p);
    return 0.5 * s.p.dot(Minv_p) + sys.potential(s.q);
}

PlantDerivative plant_vector_field(const MechanicalPHSystem& sys, const PlantState& s,
                                   const Vec& u, const Vec& f_e) {
    require(s.q.size() == sys.n && s.p.size() == sys.n,
            "plant_vector_field: state dimension mismatch");
    require(u.size() == sys.n && f_e.size() == sys.n,
            "plant_vector_field: input dimension mismatch");
    require(all_finite(s.q) && all_finite(s.p) && all_finite(u) && all_finite(f_e),
            "plant_vector_field: non-finite input");

    const Mat M = sys.mass(s.q);
    Eigen::LLT<Mat> llt(M);
    if (llt.info() != Eigen::Success)
        throw NumericalError("plant_vector_field: singular or indefinite mass matrix");

    PlantDerivative d;
    d.dq = llt.solve(s.p);
    // ∂H/∂q = ∂V/∂q + ∂(½pᵀM(q)⁻¹p)/∂q. The kinetic part is taken by central
    // differences with p held fixed; it vanishes identically (no FD noise)
    // when the mass matrix is constant.
    const Vec p = s.p;
    const auto& mass = sys.mass;
    const Vec kinetic_grad = finite_difference_gradient(
        [&mass, &p](const Vec& q) {
            return 0.5 * p.dot(Eigen::LLT<Mat>(mass(q)).solve(p));
        },
        s.q);
    d.dp = -sys.potential_grad(s.q) - kinetic_grad - sys.damping(s.q, s.p) * d.dq +
           sys.input_map(s.q) * u + sys.ext_force_map(s.q) * f_e;
    d.y = sys.input_map(s.q).transpose() * d.dq;
    return d;
}

Vec map_workspace_force(const GeometricJacobian& jac, const Vec& q, const Vec& F_e) {
    const Mat J = jac.jac(q);
    require(J.rows() == F_e.size(), "map_workspace_force: Jacobian/force dimension mismatch");
    return J.transpose() * F_e;
}

}  // namespace phgrasp
