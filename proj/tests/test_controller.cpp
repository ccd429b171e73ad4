#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "phgrasp/controller.hpp"
#include "phgrasp/models.hpp"

using namespace phgrasp;

namespace {

Vec vec1(double x) { return Vec::Constant(1, x); }
Mat mat1(double x) { return Mat::Constant(1, 1, x); }

RestLengthController gripper_controller(bool cholesky, double K_p = 1.0,
                                        double K_rl = 0.5, double C = 3.0,
                                        double q_rl0 = 0.0) {
    MechanicalPHSystem plant = gripper_system(GripperModel{});
    TransformedSystem ts = cholesky ? make_cholesky_transform(std::move(plant), vec1(0.2))
                                    : make_unit_transform(std::move(plant), vec1(0.2));
    return make_rest_length_controller(std::move(ts), mat1(K_p), mat1(K_rl), mat1(C),
                                       vec1(q_rl0));
}

}  // namespace

TEST_CASE("desired_force_to_target") {
    CHECK(desired_force_to_target(mat1(1.0), vec1(0.20))[0] == doctest::Approx(0.20));
    CHECK(desired_force_to_target(mat1(1.0), vec1(0.0))[0] == doctest::Approx(0.0));
    Mat K(2, 2);
    K << 2, 0, 0, 4;
    Vec f(2);
    f << 1, 2;
    const Vec qf = desired_force_to_target(K, f);
    CHECK(qf[0] == doctest::Approx(0.5));
    CHECK(qf[1] == doctest::Approx(0.5));
}

TEST_CASE("workspace_desired_force") {
    GeometricJacobian ident;
    ident.N = 1;
    ident.jac = [](const Vec&) { return Mat::Identity(1, 1); };
    CHECK(workspace_desired_force(ident, vec1(0.2), vec1(0.2))[0] ==
          doctest::Approx(0.2));
    CHECK(workspace_desired_force(ident, vec1(0.2), vec1(0.0))[0] == 0.0);

    std::mt19937 rng(17);
    std::normal_distribution<double> dist;
    Mat J(3, 2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) J(i, j) = dist(rng);
    GeometricJacobian rj;
    rj.N = 3;
    rj.jac = [J](const Vec&) { return J; };
    Vec F(3);
    F << 0.1, -0.2, 0.3;
    const Vec fd = workspace_desired_force(rj, Vec::Zero(2), F);
    CHECK((fd - J.transpose() * F).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("gain matrices must be SPD") {
    MechanicalPHSystem plant = gripper_system(GripperModel{});
    TransformedSystem ts = make_unit_transform(std::move(plant), vec1(0.2));
    CHECK_THROWS_AS(make_rest_length_controller(ts, mat1(-1.0), mat1(0.5), mat1(3.0),
                                                vec1(0.0)),
                    ContractViolation);
    CHECK_THROWS_AS(
        make_hogan_controller(mat1(1.0), mat1(0.0), vec1(0.2), vec1(0.0), false),
        ContractViolation);
}

TEST_CASE("adapted_momentum") {
    RestLengthController ctrl = gripper_controller(true);
    SUBCASE("pbar = 0, qbar = q_rl gives zero") {
        ctrl.q_rl = vec1(0.05);
        CHECK(adapted_momentum(ctrl, {vec1(0.05), vec1(0.0)})[0] ==
              doctest::Approx(0.0));
    }
    SUBCASE("Cholesky factor: phat = sqrt(0.5) * 0.1") {
        CHECK(adapted_momentum(ctrl, {vec1(0.1), vec1(0.0)})[0] ==
              doctest::Approx(std::sqrt(0.5) * 0.1));
    }
    SUBCASE("affine in pbar") {
        const TransformedState base{vec1(0.1), vec1(0.0)};
        const double p1 = 0.3, p2 = -0.7;
        const double a = adapted_momentum(ctrl, {vec1(0.1), vec1(p1 + p2)})[0];
        const double b = adapted_momentum(ctrl, {vec1(0.1), vec1(p2)})[0];
        CHECK(a - b == doctest::Approx(p1));
    }
}

TEST_CASE("passive_output: unit factor gives m_g*qdot + K_p*(qbar - q_rl)") {
    RestLengthController ctrl = gripper_controller(false);
    const double q = 0.27, p = 0.08;
    const double qdot = p / 0.5;
    const double expected = 0.5 * qdot + 1.0 * ((q - 0.2) - 0.0);
    CHECK(passive_output(ctrl, {vec1(q - 0.2), vec1(p)})[0] ==
          doctest::Approx(expected));
    ctrl.q_rl = vec1(q - 0.2);
    CHECK(passive_output(ctrl, {vec1(q - 0.2), vec1(0.0)})[0] == doctest::Approx(0.0));
}

TEST_CASE("rest_length_derivative") {
    RestLengthController ctrl = gripper_controller(false);
    SUBCASE("equilibrium") {
        CHECK(rest_length_derivative(ctrl, {vec1(0.0), vec1(0.0)})[0] ==
              doctest::Approx(0.0));
    }
    SUBCASE("qbar = 0.1, q_rl = 0, yhat = 0.05 gives -0.15") {
        // yhat = p + K_p*qbar = 0.05 requires p = -0.05 under the unit factor.
        const TransformedState x{vec1(0.1), vec1(-0.05)};
        CHECK(passive_output(ctrl, x)[0] == doctest::Approx(0.05));
        CHECK(rest_length_derivative(ctrl, x)[0] == doctest::Approx(-0.15));
    }
    SUBCASE("fixed point forces q_rl = 0") {
        // yhat = 0 and qbar = q_rl leave qdot_rl = -K_rl q_rl.
        ctrl.q_rl = vec1(0.2);
        const TransformedState x{vec1(0.2), vec1(-0.2)};  // p = -K_p(qbar-q_rl) = 0
        CHECK(rest_length_derivative(ctrl, {vec1(0.2), vec1(0.0)})[0] ==
              doctest::Approx(-0.5 * 0.2));
        (void)x;
    }
}

TEST_CASE("rest_length_port") {
    RestLengthController ctrl = gripper_controller(false);
    SUBCASE("zero state") {
        const RestLengthPort port = rest_length_port(ctrl, {vec1(0.0), vec1(0.0)});
        CHECK(port.u_rl[0] == doctest::Approx(0.0));
        CHECK(port.y_rl[0] == doctest::Approx(0.0));
    }
    SUBCASE("paper gains plug-in") {
        ctrl.q_rl = vec1(0.04);
        const RestLengthPort port = rest_length_port(ctrl, {vec1(0.1), vec1(0.02)});
        // y_rl = Gbar' (K_p(qbar - q_rl) + K_rl q_rl), Gbar = 1.
        CHECK(port.y_rl[0] == doctest::Approx(1.0 * (0.1 - 0.04) + 0.5 * 0.04));
        CHECK(port.u_rl[0] ==
              doctest::Approx(rest_length_derivative(ctrl, {vec1(0.1), vec1(0.02)})[0]));
    }
}

TEST_CASE("control_law: 1-DOF specialization identity (unit factor)") {
    const GripperModel g;
    RestLengthController ctrl = gripper_controller(false);
    std::mt19937 rng(23);
    std::normal_distribution<double> dq(0.25, 0.2), dp(0.0, 0.3);
    for (int i = 0; i < 200; ++i) {
        const double q = dq(rng), p = dp(rng), q_rl = dp(rng), f_e = dp(rng);
        ctrl.q_rl = vec1(q_rl);
        const TransformedState x{vec1(q - 0.2), vec1(p)};
        const double qdot = p / g.m_g;
        const double qbar = q - 0.2;
        const double yhat = g.m_g * qdot + 1.0 * (qbar - q_rl);
        const double qrl_dot = -yhat - 1.0 * (qbar - q_rl) - 0.5 * q_rl;
        const double expected = gripper_potential_grad(g, q) -
                                g.d_g * 1.0 * (qbar - q_rl) -
                                1.0 * (qdot - qrl_dot) + 0.5 * q_rl - 3.0 * yhat - f_e;
        CHECK(std::abs(control_law(ctrl, x, vec1(f_e))[0] - expected) < 1e-10);
    }
}

TEST_CASE("control_law: closed loop is stationary at the grasp equilibrium") {
    for (bool cholesky : {false, true}) {
        RestLengthController ctrl = gripper_controller(cholesky);
        const TransformedState x{vec1(0.0), vec1(0.0)};  // q = q_f, p = 0, q_rl = 0
        const double f_d = 0.2;
        const Vec v = control_law(ctrl, x, vec1(f_d));
        const TransformedDerivative d =
            transformed_vector_field(ctrl.transformed, x, v, vec1(f_d));
        CHECK(std::abs(d.dqbar[0]) < 1e-12);
        CHECK(std::abs(d.dpbar[0]) < 1e-10);
        CHECK(std::abs(rest_length_derivative(ctrl, x)[0]) < 1e-12);
    }
}

TEST_CASE("control_law: affine f_e cancellation v(f_e) - v(0) = -Gbar^-1 Bbar f_e") {
    RestLengthController ctrl = gripper_controller(true);
    const TransformedState x{vec1(0.07), vec1(0.12)};
    const double f_e = 0.31;
    const double dv = control_law(ctrl, x, vec1(f_e))[0] -
                      control_law(ctrl, x, vec1(0.0))[0];
    const double gbar = gbar_at(ctrl.transformed, x.qbar)(0, 0);
    const double bbar = bbar_at(ctrl.transformed, x.qbar)(0, 0);
    CHECK(dv == doctest::Approx(-bbar * f_e / gbar).epsilon(1e-12));
}

TEST_CASE("storage function and power-balance structure") {
    RestLengthController ctrl = gripper_controller(false);
    ctrl.q_rl = vec1(0.03);
    const TransformedState x{vec1(0.1), vec1(0.05)};
    const double phat = adapted_momentum(ctrl, x)[0];
    const double qhat = 0.1 - 0.03;
    const double expected =
        0.5 * phat * phat + 0.5 * 1.0 * qhat * qhat + 0.5 * 0.5 * 0.03 * 0.03;
    CHECK(storage_function(ctrl, x) == doctest::Approx(expected).epsilon(1e-12));

    const Mat U = power_balance_form(ctrl, x);
    CHECK(U(0, 0) == 1.0);  // K_p*K_p exactly
    CHECK(U(2, 2) == 1.0);  // identity block
    // (phat,phat) block: Dbar + Gbar C Gbar' = d_g + C = 0.1 + 3.0.
    CHECK(U(1, 1) == doctest::Approx(3.1));

    const Vec z = power_balance_z(ctrl, x);
    CHECK(z[0] == doctest::Approx(qhat));
    CHECK(z[1] == doctest::Approx(phat));
    CHECK(z[2] == doctest::Approx(1.0 * qhat + 0.5 * 0.03));
}

TEST_CASE("closed-loop dissipation: symmetric part positive definite") {
    RestLengthController ctrl = gripper_controller(true);
    std::mt19937 rng(29);
    std::normal_distribution<double> dist(0.1, 0.1);
    for (int i = 0; i < 20; ++i) {
        const TransformedState x{vec1(dist(rng)), vec1(dist(rng))};
        const Mat Dt = closed_loop_dissipation(ctrl, x);
        CHECK(min_eigenvalue_sym(0.5 * (Dt + Dt.transpose())) > 0.0);
    }
}

TEST_CASE("hogan_control") {
    const GripperModel g;
    MechanicalPHSystem sys = gripper_system(g);
    SUBCASE("all-zero configuration") {
        const HoganController ctrl =
            make_hogan_controller(mat1(1.0), mat1(3.0), vec1(g.c_g), vec1(0.0), false);
        CHECK(hogan_control(ctrl, sys, {vec1(g.c_g), vec1(0.0), 0.0}, vec1(0.0))[0] ==
              doctest::Approx(0.0));
    }
    SUBCASE("hand-evaluated scalar expression") {
        const HoganController ctrl =
            make_hogan_controller(mat1(1.0), mat1(3.0), vec1(0.2), vec1(0.0), false);
        const double q = 0.3, p = 0.05;
        const double qdot = p / g.m_g;
        const double expected = g.d_g * qdot + gripper_potential_grad(g, q) -
                                1.0 * (q - 0.2) - 3.0 * qdot;
        CHECK(hogan_control(ctrl, sys, {vec1(q), vec1(p), 0.0}, vec1(0.0))[0] ==
              doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("compensate_external toggling changes output by exactly -f_e") {
        const HoganController plain =
            make_hogan_controller(mat1(1.0), mat1(3.0), vec1(0.2), vec1(0.0), false);
        const HoganController comp =
            make_hogan_controller(mat1(1.0), mat1(3.0), vec1(0.2), vec1(0.0), true);
        const PlantState s{vec1(0.25), vec1(0.02), 0.0};
        const double f_e = 0.4;
        CHECK(hogan_control(comp, sys, s, vec1(f_e))[0] ==
              hogan_control(plain, sys, s, vec1(f_e))[0] - f_e);
    }
}
