#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>

namespace phgrasp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Thrown when a caller violates a documented precondition (dimension
// mismatch, NaN input, non-SPD gain, malformed config, ...).
class ContractViolation : public std::invalid_argument {
public:
    explicit ContractViolation(const std::string& what)
        : std::invalid_argument(what) {}
};

// Thrown when a numerically required property fails at runtime
// (singular mass matrix, failed Cholesky pivot, diverging run, ...).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what)
        : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractViolation(msg);
}

inline bool all_finite(const Vec& v) { return v.allFinite(); }

// Central finite-difference gradient of a scalar field, step scaled per
// coordinate as h = base_step * max(1, |q_i|).
inline Vec finite_difference_gradient(const std::function<double(const Vec&)>& f,
                                      const Vec& q, double base_step = 1e-6) {
    Vec g(q.size());
    Vec qp = q, qm = q;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        const double h = base_step * std::max(1.0, std::abs(q[i]));
        qp[i] = q[i] + h;
        qm[i] = q[i] - h;
        g[i] = (f(qp) - f(qm)) / (2.0 * h);
        qp[i] = q[i];
        qm[i] = q[i];
    }
    return g;
}

inline bool is_symmetric(const Mat& A, double tol = 1e-9) {
    return (A - A.transpose()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, A.cwiseAbs().maxCoeff());
}

inline double min_eigenvalue_sym(const Mat& A) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()),
                                          Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace phgrasp
