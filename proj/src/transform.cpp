#include "phgrasp/transform.hpp"

#include <cmath>

namespace phgrasp {

namespace {

// T is lower-triangular with positive diagonal throughout this module.
Vec solve_lower(const Mat& T, const Vec& b) {
    return T.triangularView<Eigen::Lower>().solve(b);
}
Vec solve_upper_t(const Mat& T, const Vec& b) {  // T⁻ᵀ b
    return T.transpose().triangularView<Eigen::Upper>().solve(b);
}
Mat solve_lower_mat(const Mat& T, const Mat& B) {
    return T.triangularView<Eigen::Lower>().solve(B);
}

}  // namespace

Mat cholesky_factor(const Mat& M) {
    require(M.rows() == M.cols(), "cholesky_factor: matrix must be square");
    require(is_symmetric(M, 1e-10), "cholesky_factor: matrix must be symmetric");
    const Eigen::Index n = M.rows();
    Mat L = Mat::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = M(j, j) - L.row(j).head(j).squaredNorm();
        if (d <= 0.0)
            throw NumericalError("cholesky_factor: non-positive pivot at index " +
                                 std::to_string(j));
        L(j, j) = std::sqrt(d);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            L(i, j) = (M(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
        }
    }
    return L;
}

static TransformedSystem make_transform_impl(MechanicalPHSystem sys, const Vec& q_f,
                                             std::function<Mat(const Vec&)> factor,
                                             bool is_cholesky) {
    require(q_f.size() == sys.n, "transform: q_f dimension mismatch");
    TransformedSystem ts;
    ts.base = std::move(sys);
    ts.q_f = q_f;
    ts.factor = std::move(factor);
    ts.factor_is_cholesky = is_cholesky;
    // Default ∂(T̄⁻¹p̄)/∂q̄ by central differences in q̄, column by column.
    // p̄ = T(q)⁻¹ p is differentiated as a function of q with the physical
    // momentum p held fixed — that is the derivative the momentum
    // transformation produces (holding p̄ fixed instead scales the
    // gyroscopic term wrongly for nonconstant mass).
    auto fac = ts.factor;
    const Vec qf = q_f;
    ts.factor_state_jac = [fac, qf](const Vec& qbar, const Vec& pbar) {
        const Eigen::Index n = qbar.size();
        const Vec p = fac(qbar + qf) * pbar;
        Mat J(n, n);
        const double h = 1e-6;
        Vec qp = qbar, qm = qbar;
        for (Eigen::Index i = 0; i < n; ++i) {
            qp[i] += h;
            qm[i] -= h;
            const Vec fp = fac(qp + qf).triangularView<Eigen::Lower>().solve(p);
            const Vec fm = fac(qm + qf).triangularView<Eigen::Lower>().solve(p);
            J.col(i) = (fp - fm) / (2.0 * h);
            qp[i] = qbar[i];
            qm[i] = qbar[i];
        }
        return J;
    };
    return ts;
}

TransformedSystem make_cholesky_transform(MechanicalPHSystem sys, const Vec& q_f) {
    auto mass = sys.mass;
    return make_transform_impl(
        std::move(sys), q_f, [mass](const Vec& q) { return cholesky_factor(mass(q)); },
        true);
}

TransformedSystem make_unit_transform(MechanicalPHSystem sys, const Vec& q_f) {
    const int n = sys.n;
    return make_transform_impl(
        std::move(sys), q_f, [n](const Vec&) { return Mat::Identity(n, n); }, false);
}

Mat factor_at(const TransformedSystem& ts, const Vec& qbar) {
    return ts.factor(qbar + ts.q_f);
}

Mat dbar_at(const TransformedSystem& ts, const Vec& qbar, const Vec& pbar) {
    const Mat T = factor_at(ts, qbar);
    const Vec q = qbar + ts.q_f;
    const Vec p = T * pbar;
    const Mat D = ts.base.damping(q, p);
    // D̄ = T⁻¹ D T⁻ᵀ via two triangular solves.
    const Mat X = solve_lower_mat(T, D);
    return solve_lower_mat(T, X.transpose()).transpose();
}

Mat gbar_at(const TransformedSystem& ts, const Vec& qbar) {
    const Mat T = factor_at(ts, qbar);
    return solve_lower_mat(T, ts.base.input_map(qbar + ts.q_f));
}

Mat bbar_at(const TransformedSystem& ts, const Vec& qbar) {
    const Mat T = factor_at(ts, qbar);
    return solve_lower_mat(T, ts.base.ext_force_map(qbar + ts.q_f));
}

Vec vbar_grad_at(const TransformedSystem& ts, const Vec& qbar) {
    return ts.base.potential_grad(qbar + ts.q_f);
}

TransformedState to_transformed(const TransformedSystem& ts, const PlantState& s) {
    require(s.q.size() == ts.base.n, "to_transformed: dimension mismatch");
    TransformedState x;
    x.qbar = s.q - ts.q_f;
    const Mat T = ts.factor(s.q);
    if ((T.diagonal().array() <= 0.0).any())
        throw NumericalError("to_transformed: factor has non-positive diagonal");
    x.pbar = solve_lower(T, s.p);
    return x;
}

PlantState from_transformed(const TransformedSystem& ts, const TransformedState& xbar) {
    PlantState s;
    s.q = xbar.qbar + ts.q_f;
    s.p = ts.factor(s.q) * xbar.pbar;
    return s;
}

Mat gyroscopic_matrix_raw(const TransformedSystem& ts, const TransformedState& xbar) {
    const Mat T = factor_at(ts, xbar.qbar);
    const Mat A = ts.factor_state_jac(xbar.qbar, xbar.pbar);
    // A T̄⁻ᵀ − T̄⁻¹ Aᵀ
    const Mat right = T.transpose()
                          .triangularView<Eigen::Upper>()
                          .solve(A.transpose())
                          .transpose();           // A T⁻ᵀ
    const Mat left = solve_lower_mat(T, A.transpose());  // T⁻¹ Aᵀ
    return right - left;
}

Mat gyroscopic_matrix(const TransformedSystem& ts, const TransformedState& xbar) {
    const Mat A = gyroscopic_matrix_raw(ts, xbar);
    return 0.5 * (A - A.transpose());
}

double transformed_hamiltonian(const TransformedSystem& ts, const TransformedState& xbar) {
    return 0.5 * xbar.pbar.squaredNorm() + ts.base.potential(xbar.qbar + ts.q_f);
}

TransformedDerivative transformed_vector_field(const TransformedSystem& ts,
                                               const TransformedState& xbar,
                                               const Vec& v, const Vec& f_e) {
    const int n = ts.base.n;
    require(v.size() == n && f_e.size() == n,
            "transformed_vector_field: input dimension mismatch");
    const Mat T = factor_at(ts, xbar.qbar);
    const Mat J2 = gyroscopic_matrix(ts, xbar);
    const Mat Dbar = dbar_at(ts, xbar.qbar, xbar.pbar);
    const Mat Gbar = gbar_at(ts, xbar.qbar);
    const Mat Bbar = bbar_at(ts, xbar.qbar);
    const Vec dVbar = vbar_grad_at(ts, xbar.qbar);

    TransformedDerivative d;
    d.dqbar = solve_upper_t(T, xbar.pbar);
    d.dpbar = -solve_lower(T, dVbar) + (J2 - Dbar) * xbar.pbar + Gbar * v + Bbar * f_e;
    d.ybar = Gbar.transpose() * xbar.pbar;
    return d;
}

}  // namespace phgrasp
