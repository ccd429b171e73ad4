#include "phgrasp/controller.hpp"

namespace phgrasp {

namespace {

void require_spd(const Mat& A, const char* name) {
    require(A.rows() == A.cols(), std::string(name) + " must be square");
    if (!is_symmetric(A) || min_eigenvalue_sym(A) <= 0.0)
        throw ContractViolation(std::string(name) + " must be symmetric positive definite");
}

Mat inverse_of_factor(const Mat& T) {  // T⁻¹ for lower-triangular T
    return T.triangularView<Eigen::Lower>().solve(Mat::Identity(T.rows(), T.cols()));
}

}  // namespace

RestLengthController make_rest_length_controller(TransformedSystem transformed,
                                                 Mat K_p, Mat K_rl, Mat C,
                                                 Vec q_rl0) {
    require_spd(K_p, "K_p");
    require_spd(K_rl, "K_rl");
    require_spd(C, "C");
    require(all_finite(q_rl0), "q_rl(0) must be finite");
    require(q_rl0.size() == transformed.base.n, "q_rl(0) dimension mismatch");

    RestLengthController ctrl;
    ctrl.K_p = std::move(K_p);
    ctrl.K_rl = std::move(K_rl);
    ctrl.C = std::move(C);
    ctrl.q_f = transformed.q_f;
    ctrl.q_rl = std::move(q_rl0);
    ctrl.transformed = std::move(transformed);
    return ctrl;
}

Vec desired_force_to_target(const Mat& K_p, const Vec& f_d) {
    require(K_p.rows() == f_d.size(), "desired_force_to_target: dimension mismatch");
    Eigen::LLT<Mat> llt(K_p);
    if (llt.info() != Eigen::Success)
        throw NumericalError("desired_force_to_target: K_p not SPD");
    return llt.solve(f_d);
}

Vec workspace_desired_force(const GeometricJacobian& jac, const Vec& q_f, const Vec& F_d) {
    return jac.jac(q_f).transpose() * F_d;
}

Vec adapted_momentum(const RestLengthController& ctrl, const TransformedState& xbar) {
    const Mat T = factor_at(ctrl.transformed, xbar.qbar);
    return xbar.pbar + T.transpose() * (ctrl.K_p * (xbar.qbar - ctrl.q_rl));
}

Vec passive_output(const RestLengthController& ctrl, const TransformedState& xbar) {
    return gbar_at(ctrl.transformed, xbar.qbar).transpose() * adapted_momentum(ctrl, xbar);
}

Vec rest_length_derivative(const RestLengthController& ctrl, const TransformedState& xbar) {
    return -passive_output(ctrl, xbar) - ctrl.K_p * (xbar.qbar - ctrl.q_rl) -
           ctrl.K_rl * ctrl.q_rl;
}

RestLengthPort rest_length_port(const RestLengthController& ctrl, const TransformedState& xbar) {
    RestLengthPort port;
    port.u_rl = rest_length_derivative(ctrl, xbar);
    port.y_rl = gbar_at(ctrl.transformed, xbar.qbar).transpose() *
                (ctrl.K_p * (xbar.qbar - ctrl.q_rl) + ctrl.K_rl * ctrl.q_rl);
    return port;
}

Vec control_law(const RestLengthController& ctrl, const TransformedState& xbar, const Vec& f_e) {
    const TransformedSystem& ts = ctrl.transformed;
    const int n = ts.base.n;
    require(f_e.size() == n, "control_law: f_e dimension mismatch");

    const Mat T = factor_at(ts, xbar.qbar);
    const Mat Tinv = inverse_of_factor(T);
    const Mat J2 = gyroscopic_matrix(ts, xbar);
    const Mat Dbar = dbar_at(ts, xbar.qbar, xbar.pbar);
    const Mat Gbar = gbar_at(ts, xbar.qbar);
    const Mat Bbar = bbar_at(ts, xbar.qbar);

    const Vec qhat = xbar.qbar - ctrl.q_rl;
    const Vec Kp_qhat = ctrl.K_p * qhat;
    // q̄̇ from the base kinematics: M⁻¹ T p̄. Equal to T⁻ᵀ p̄ when T Tᵀ = M;
    // under the unit-factor convention (T ≡ I but M ≠ I) it is still the
    // physical velocity, which is what the constant-mass law feeds back.
    const Vec q = xbar.qbar + ts.q_f;
    Eigen::LLT<Mat> mass_llt(ts.base.mass(q));
    if (mass_llt.info() != Eigen::Success)
        throw NumericalError("control_law: singular or indefinite mass matrix");
    const Vec qbar_dot = mass_llt.solve(T * xbar.pbar);
    const Vec qrl_dot = rest_length_derivative(ctrl, xbar);
    const Vec yhat = passive_output(ctrl, xbar);

    // Ṫ as the directional derivative of the factor along q̇.
    const double h = 1e-6;
    const Mat Tdot = (ts.factor(q + h * qbar_dot) - ts.factor(q - h * qbar_dot)) / (2.0 * h);

    Vec bracket = Tinv * vbar_grad_at(ts, xbar.qbar);
    bracket += Gbar * (ctrl.K_rl * ctrl.q_rl);
    bracket -= Bbar * f_e;
    bracket += (Gbar * Tinv.transpose() - Tinv.transpose() + J2 - Dbar) *
               (T.transpose() * Kp_qhat);
    bracket -= T.transpose() * (ctrl.K_p * (qbar_dot - qrl_dot));
    bracket -= Tdot.transpose() * Kp_qhat;

    Eigen::FullPivLU<Mat> lu(Gbar);
    if (!lu.isInvertible())
        throw NumericalError("control_law: Ḡ is singular");
    return lu.solve(bracket) - ctrl.C * yhat;
}

double storage_function(const RestLengthController& ctrl, const TransformedState& xbar) {
    const Vec phat = adapted_momentum(ctrl, xbar);
    const Vec qhat = xbar.qbar - ctrl.q_rl;
    return 0.5 * phat.squaredNorm() + 0.5 * qhat.dot(ctrl.K_p * qhat) +
           0.5 * ctrl.q_rl.dot(ctrl.K_rl * ctrl.q_rl);
}

Mat power_balance_form(const RestLengthController& ctrl, const TransformedState& xbar) {
    const int n = ctrl.transformed.base.n;
    const Mat Gbar = gbar_at(ctrl.transformed, xbar.qbar);
    Mat U = Mat::Zero(3 * n, 3 * n);
    U.topLeftCorner(n, n) = ctrl.K_p * ctrl.K_p;
    U.block(n, n, n, n) = dbar_at(ctrl.transformed, xbar.qbar, xbar.pbar) +
                          Gbar * ctrl.C * Gbar.transpose();
    U.bottomRightCorner(n, n) = Mat::Identity(n, n);
    return U;
}

Vec power_balance_z(const RestLengthController& ctrl, const TransformedState& xbar) {
    const int n = ctrl.transformed.base.n;
    const Vec qhat = xbar.qbar - ctrl.q_rl;
    Vec z(3 * n);
    z.head(n) = qhat;
    z.segment(n, n) = adapted_momentum(ctrl, xbar);
    z.tail(n) = ctrl.K_p * qhat + ctrl.K_rl * ctrl.q_rl;
    return z;
}

Mat closed_loop_dissipation(const RestLengthController& ctrl, const TransformedState& xbar) {
    const Mat Gbar = gbar_at(ctrl.transformed, xbar.qbar);
    return -gyroscopic_matrix(ctrl.transformed, xbar) +
           dbar_at(ctrl.transformed, xbar.qbar, xbar.pbar) +
           Gbar * ctrl.C * Gbar.transpose();
}

HoganController make_hogan_controller(Mat K_Hp, Mat K_Hd, Vec q_f, Vec qdot_f,
                                      bool compensate_external) {
    require_spd(K_Hp, "K_Hp");
    require_spd(K_Hd, "K_Hd");
    HoganController ctrl;
    ctrl.K_Hp = std::move(K_Hp);
    ctrl.K_Hd = std::move(K_Hd);
    ctrl.q_f = std::move(q_f);
    ctrl.qdot_f = std::move(qdot_f);
    ctrl.compensate_external = compensate_external;
    return ctrl;
}

Vec hogan_control(const HoganController& ctrl, const MechanicalPHSystem& sys,
                  const PlantState& s, const Vec& f_e) {
    const Mat M = sys.mass(s.q);
    Eigen::LLT<Mat> llt(M);
    if (llt.info() != Eigen::Success)
        throw NumericalError("hogan_control: singular or indefinite mass matrix");
    const Vec qdot = llt.solve(s.p);
    Vec u = sys.damping(s.q, s.p) * qdot + sys.potential_grad(s.q) -
            ctrl.K_Hp * (s.q - ctrl.q_f) - ctrl.K_Hd * (qdot - ctrl.qdot_f);
    if (ctrl.compensate_external) u -= f_e;
    return u;
}

}  // namespace phgrasp
