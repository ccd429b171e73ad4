#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "phgrasp/models.hpp"
#include "phgrasp/transform.hpp"

using namespace phgrasp;

namespace {

Vec vec1(double x) { return Vec::Constant(1, x); }

// 2-DOF nonconstant-mass system for the gyroscopic-term tests.
MechanicalPHSystem two_dof() {
    return make_system(
        2,
        [](const Vec& q) {
            Mat M = Mat::Identity(2, 2);
            M(1, 1) = 2.0 + std::sin(q[0]);
            return M;
        },
        [](const Vec& q) { return 0.5 * q.squaredNorm(); },
        [](const Vec& q) { return q; },
        [](const Vec&, const Vec&) { return Mat::Identity(2, 2) * 0.1; },
        [](const Vec&) { return Mat::Identity(2, 2); });
}

}  // namespace

TEST_CASE("cholesky_factor: identity, scalar, 2x2") {
    CHECK((cholesky_factor(Mat::Identity(3, 3)) - Mat::Identity(3, 3))
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK(cholesky_factor(Mat::Constant(1, 1, 4.0))(0, 0) == doctest::Approx(2.0));

    Mat M(2, 2);
    M << 4, 2, 2, 5;
    const Mat T = cholesky_factor(M);
    CHECK(T(0, 0) == doctest::Approx(2.0));
    CHECK(T(0, 1) == doctest::Approx(0.0));
    CHECK(T(1, 0) == doctest::Approx(1.0));
    CHECK(T(1, 1) == doctest::Approx(2.0));
    CHECK((T * T.transpose() - M).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("cholesky_factor: non-SPD input names the failing pivot") {
    Mat M(2, 2);
    M << 1, 2, 2, 1;  // indefinite
    CHECK_THROWS_AS(cholesky_factor(M), NumericalError);
    try {
        cholesky_factor(M);
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("pivot") != std::string::npos);
    }
}

TEST_CASE("to_transformed: gripper with Cholesky factor") {
    const TransformedSystem ts =
        make_cholesky_transform(gripper_system(GripperModel{}), vec1(0.2));
    SUBCASE("q = q_f, p = 0 maps to the origin") {
        const TransformedState x = to_transformed(ts, {vec1(0.2), vec1(0.0), 0.0});
        CHECK(x.qbar[0] == doctest::Approx(0.0));
        CHECK(x.pbar[0] == doctest::Approx(0.0));
    }
    SUBCASE("q = 0.30, p = 0.1: qbar = 0.10, pbar = 0.1/sqrt(0.5)") {
        const TransformedState x = to_transformed(ts, {vec1(0.30), vec1(0.1), 0.0});
        CHECK(x.qbar[0] == doctest::Approx(0.10));
        CHECK(x.pbar[0] == doctest::Approx(0.1 / std::sqrt(0.5)));
    }
    SUBCASE("from_transformed at the origin and pbar = 1") {
        const PlantState s0 = from_transformed(ts, {vec1(0.0), vec1(0.0)});
        CHECK(s0.q[0] == doctest::Approx(0.2));
        CHECK(s0.p[0] == doctest::Approx(0.0));
        const PlantState s1 = from_transformed(ts, {vec1(0.0), vec1(1.0)});
        CHECK(s1.p[0] == doctest::Approx(std::sqrt(0.5)));
    }
}

TEST_CASE("round-trip to_transformed . from_transformed on random states") {
    const TransformedSystem ts = make_cholesky_transform(two_dof(), Vec::Zero(2));
    std::mt19937 rng(5);
    std::normal_distribution<double> dist(0.0, 0.8);
    for (int i = 0; i < 200; ++i) {
        Vec q(2), p(2);
        q << dist(rng), dist(rng);
        p << dist(rng), dist(rng);
        const PlantState back = from_transformed(ts, to_transformed(ts, {q, p, 0.0}));
        CHECK((back.q - q).cwiseAbs().maxCoeff() == 0.0);  // pure shift, exact
        CHECK((back.p - p).cwiseAbs().maxCoeff() <
              1e-12 * std::max(1.0, p.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("gyroscopic matrix: zero for constant mass and for pbar = 0") {
    const TransformedSystem grip =
        make_cholesky_transform(gripper_system(GripperModel{}), vec1(0.2));
    CHECK(gyroscopic_matrix(grip, {vec1(0.1), vec1(0.7)}).cwiseAbs().maxCoeff() < 1e-9);

    const TransformedSystem ts = make_cholesky_transform(two_dof(), Vec::Zero(2));
    CHECK(gyroscopic_matrix(ts, {Vec::Constant(2, 0.3), Vec::Zero(2)})
              .cwiseAbs()
              .maxCoeff() < 1e-9);
}

TEST_CASE("gyroscopic matrix: raw assembly is already skew to 1e-6") {
    const TransformedSystem ts = make_cholesky_transform(two_dof(), Vec::Zero(2));
    std::mt19937 rng(9);
    std::normal_distribution<double> dist(0.0, 0.6);
    for (int i = 0; i < 30; ++i) {
        Vec qb(2), pb(2);
        qb << dist(rng), dist(rng);
        pb << dist(rng), dist(rng);
        const Mat raw = gyroscopic_matrix_raw(ts, {qb, pb});
        CHECK((raw + raw.transpose()).cwiseAbs().maxCoeff() < 1e-6);
        const Mat J2 = gyroscopic_matrix(ts, {qb, pb});
        CHECK((J2 + J2.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("transformed Hamiltonian equals the plant Hamiltonian") {
    MechanicalPHSystem sys = two_dof();
    const TransformedSystem ts = make_cholesky_transform(sys, Vec::Zero(2));
    std::mt19937 rng(13);
    std::normal_distribution<double> dist(0.0, 0.5);
    for (int i = 0; i < 100; ++i) {
        Vec q(2), p(2);
        q << dist(rng), dist(rng);
        p << dist(rng), dist(rng);
        const double h = hamiltonian(sys, {q, p, 0.0});
        const double hbar = transformed_hamiltonian(ts, to_transformed(ts, {q, p, 0.0}));
        CHECK(std::abs(h - hbar) <= 1e-10 * std::max(1.0, std::abs(h)));
    }
}

TEST_CASE("Dbar is symmetric PSD whenever D is") {
    const TransformedSystem ts = make_cholesky_transform(two_dof(), Vec::Zero(2));
    const Mat Dbar = dbar_at(ts, Vec::Constant(2, 0.2), Vec::Zero(2));
    CHECK(is_symmetric(Dbar, 1e-12));
    CHECK(min_eigenvalue_sym(Dbar) > -1e-9);
}

TEST_CASE("transformed vector field: zero at a critical point of Vbar") {
    const TransformedSystem ts = make_cholesky_transform(two_dof(), Vec::Zero(2));
    // V = 1/2 q'q has its critical point at q = 0 = q_f, i.e. qbar = 0.
    const TransformedDerivative d = transformed_vector_field(
        ts, {Vec::Zero(2), Vec::Zero(2)}, Vec::Zero(2), Vec::Zero(2));
    CHECK(d.dqbar.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(d.dpbar.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("constant-mass 1-DOF: transformed field is the plant field rescaled") {
    const GripperModel g;
    MechanicalPHSystem sys = gripper_system(g);
    const TransformedSystem ts = make_cholesky_transform(sys, vec1(0.2));
    const PlantState s{vec1(0.27), vec1(0.06), 0.0};
    const Vec v = vec1(0.03), fe = vec1(0.01);
    const double sqrt_m = std::sqrt(g.m_g);

    // The physical input is shared; it reaches the momentum through
    // Gbar = T^-1 G, which is where the 1/sqrt(m) scaling appears.
    const TransformedDerivative dt_ =
        transformed_vector_field(ts, to_transformed(ts, s), v, fe);
    const PlantDerivative dp_ = plant_vector_field(sys, s, v, fe);
    CHECK(dt_.dqbar[0] == doctest::Approx(dp_.dq[0]).epsilon(1e-10));
    CHECK(dt_.dpbar[0] == doctest::Approx(dp_.dp[0] / sqrt_m).epsilon(1e-10));
}

TEST_CASE("unit-factor convention: T = I so pbar = p, Gbar = G") {
    const TransformedSystem ts =
        make_unit_transform(gripper_system(GripperModel{}), vec1(0.2));
    CHECK_FALSE(ts.factor_is_cholesky);
    const TransformedState x = to_transformed(ts, {vec1(0.3), vec1(0.1), 0.0});
    CHECK(x.pbar[0] == 0.1);
    CHECK(gbar_at(ts, x.qbar)(0, 0) == doctest::Approx(1.0));
}
