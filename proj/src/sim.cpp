#include "phgrasp/sim.hpp"

#include <cmath>
#include <sstream>

namespace phgrasp {

namespace {

Vec vec1(double x) { return Vec::Constant(1, x); }

struct Derivatives {
    double dq = 0, dp = 0, dq_rl = 0, dq_obj = 0, dp_obj = 0;
    double f_e = 0, u = 0;
};

double eval_control(const SimSession& ss, double q, double p, double q_rl, double f_e) {
    if (ss.has_rest_length) {
        RestLengthController ctrl = ss.rest_length;
        ctrl.q_rl = vec1(q_rl);
        PlantState s{vec1(q), vec1(p), 0.0};
        const TransformedState xbar = to_transformed(ctrl.transformed, s);
        return control_law(ctrl, xbar, vec1(f_e))[0];
    }
    PlantState s{vec1(q), vec1(p), 0.0};
    return hogan_control(ss.hogan, ss.plant, s, vec1(f_e))[0];
}

Derivatives derivatives(const SimSession& ss, const StateBundle& s,
                        const double* zoh_control) {
    const Scenario& sc = ss.scenario;
    Derivatives d;
    const double qdot = s.p / sc.gripper.m_g;
    const bool compliant = sc.object_mode == ContactMode::Compliant;
    const double y_c = (compliant && s.engaged) ? s.p_obj / sc.compliant.m_c : 0.0;
    const ContactForces cf = contact_force(sc.coupling, s.engaged, s.q, qdot, y_c);
    d.f_e = cf.f_e;
    d.u = zoh_control ? *zoh_control : eval_control(ss, s.q, s.p, s.q_rl, cf.f_e);

    const PlantDerivative pd =
        plant_vector_field(ss.plant, {vec1(s.q), vec1(s.p), s.t}, vec1(d.u), vec1(d.f_e));
    d.dq = pd.dq[0];
    d.dp = pd.dp[0];

    if (ss.has_rest_length) {
        RestLengthController ctrl = ss.rest_length;
        ctrl.q_rl = vec1(s.q_rl);
        const TransformedState xbar =
            to_transformed(ctrl.transformed, {vec1(s.q), vec1(s.p), s.t});
        d.dq_rl = rest_length_derivative(ctrl, xbar)[0];
    }

    // The compliant body integrates only while engaged; it freezes otherwise.
    if (compliant && s.engaged) {
        const PlantDerivative od = plant_vector_field(
            ss.object, {vec1(s.q_obj), vec1(s.p_obj), s.t}, vec1(cf.u_c), vec1(0.0));
        d.dq_obj = od.dq[0];
        d.dp_obj = od.dp[0];
    }
    return d;
}

StateBundle advanced(const StateBundle& s, const Derivatives& d, double dt) {
    StateBundle r = s;
    r.q += dt * d.dq;
    r.p += dt * d.dp;
    r.q_rl += dt * d.dq_rl;
    r.q_obj += dt * d.dq_obj;
    r.p_obj += dt * d.dp_obj;
    return r;
}

}  // namespace

SimSession make_session(const Scenario& sc) {
    sc.validate();
    SimSession ss;
    ss.scenario = sc;
    ss.plant = gripper_system(sc.gripper);
    ss.object = compliant_system(sc.compliant);

    const Vec q_f = vec1(sc.q_f());
    if (sc.controller == ControllerKind::RestLength) {
        const RestLengthSpec& r = sc.rest_length;
        TransformedSystem ts = (r.factor == FactorConvention::Unit)
                                   ? make_unit_transform(ss.plant, q_f)
                                   : make_cholesky_transform(ss.plant, q_f);
        ss.rest_length = make_rest_length_controller(
            std::move(ts), Mat::Constant(1, 1, r.K_p), Mat::Constant(1, 1, r.K_rl),
            Mat::Constant(1, 1, r.C), vec1(r.q_rl0));
        ss.has_rest_length = true;
    } else {
        ss.hogan = make_hogan_controller(Mat::Constant(1, 1, sc.hogan.K_Hp),
                                         Mat::Constant(1, 1, sc.hogan.K_Hd), q_f,
                                         vec1(0.0), sc.hogan.compensate_external);
        ss.has_rest_length = false;
    }
    return ss;
}

StateBundle step(const SimSession& ss, const StateBundle& s, double dt,
                 const double* zoh_control) {
    StateBundle next;
    if (ss.scenario.integrator.method == IntegrationMethod::RK4) {
        const Derivatives k1 = derivatives(ss, s, zoh_control);
        StateBundle s2 = advanced(s, k1, dt / 2);
        s2.t = s.t + dt / 2;
        const Derivatives k2 = derivatives(ss, s2, zoh_control);
        StateBundle s3 = advanced(s, k2, dt / 2);
        s3.t = s.t + dt / 2;
        const Derivatives k3 = derivatives(ss, s3, zoh_control);
        StateBundle s4 = advanced(s, k3, dt);
        s4.t = s.t + dt;
        const Derivatives k4 = derivatives(ss, s4, zoh_control);

        next = s;
        next.q += dt / 6 * (k1.dq + 2 * k2.dq + 2 * k3.dq + k4.dq);
        next.p += dt / 6 * (k1.dp + 2 * k2.dp + 2 * k3.dp + k4.dp);
        next.q_rl += dt / 6 * (k1.dq_rl + 2 * k2.dq_rl + 2 * k3.dq_rl + k4.dq_rl);
        next.q_obj += dt / 6 * (k1.dq_obj + 2 * k2.dq_obj + 2 * k3.dq_obj + k4.dq_obj);
        next.p_obj += dt / 6 * (k1.dp_obj + 2 * k2.dp_obj + 2 * k3.dp_obj + k4.dp_obj);
    } else {
        // Semi-implicit Euler: momenta (and controller/object states) first
        // with derivatives at the current state, then positions with the
        // updated momenta.
        const Derivatives k = derivatives(ss, s, zoh_control);
        next = s;
        next.p += dt * k.dp;
        next.q_rl += dt * k.dq_rl;
        next.p_obj += dt * k.dp_obj;
        next.q += dt * next.p / ss.scenario.gripper.m_g;
        if (ss.scenario.object_mode == ContactMode::Compliant && s.engaged)
            next.q_obj += dt * next.p_obj / ss.scenario.compliant.m_c;
    }
    next.t = s.t + dt;
    next.engaged = s.engaged;
    return next;
}

RunRecord run(const Scenario& sc) {
    const SimSession ss = make_session(sc);
    const double dt = sc.integrator.dt;
    const std::size_t n_steps =
        static_cast<std::size_t>(std::llround(sc.integrator.t_end / dt));

    RunRecord rec;
    rec.meta.scenario_name = sc.name;
    rec.meta.controller_type =
        sc.controller == ControllerKind::RestLength
            ? "rest_length"
            : (sc.hogan.compensate_external ? "hogan_fe" : "hogan");
    rec.meta.object_type = sc.object_mode == ContactMode::Rigid ? "rigid" : "compliant";
    rec.meta.grad_is_finite_difference = ss.plant.grad_is_finite_difference;
    rec.meta.q_rl0 = sc.rest_length.q_rl0;
    rec.meta.dt = dt;
    rec.meta.t_end = sc.integrator.t_end;
    rec.meta.f_d = sc.f_d;
    rec.meta.engage_position = sc.coupling.engage_position;
    rec.meta.decisions.push_back("q_rl0=" + std::to_string(sc.rest_length.q_rl0));
    rec.meta.decisions.push_back(
        std::string("factor=") +
        (sc.rest_length.factor == FactorConvention::Unit ? "unit" : "cholesky"));
    rec.meta.decisions.push_back("contact_switch=step_boundary");

    StateBundle s;
    s.q = sc.q0;
    s.p = sc.p0;
    s.q_rl = sc.rest_length.q_rl0;
    s.q_obj = sc.compliant.q_c;
    s.p_obj = 0.0;
    s.engaged = false;

    std::vector<double> analytic_power;  // −zᵀUz per sample (rest-length only)
    std::vector<double> yhat_abs;

    double zoh_value = 0.0;
    double next_zoh_time = 0.0;
    const bool use_zoh = sc.zoh_period > 0.0;

    for (std::size_t i = 0; i <= n_steps; ++i) {
        s.engaged = update_engagement(sc.coupling, s.engaged, s.q);

        const Derivatives d = derivatives(ss, s, nullptr);
        if (!std::isfinite(s.q) || !std::isfinite(s.p) || std::abs(s.q) > 1e6 ||
            std::abs(s.p) > 1e6)
            throw NumericalError("run: diverged at t=" + std::to_string(s.t));

        rec.t.push_back(s.t);
        rec.q.push_back(s.q);
        rec.p.push_back(s.p);
        rec.q_rl.push_back(s.q_rl);
        rec.qbar.push_back(s.q - sc.q_f());
        rec.f_e.push_back(d.f_e);
        rec.u.push_back(d.u);
        rec.H.push_back(hamiltonian(ss.plant, {vec1(s.q), vec1(s.p), s.t}));
        rec.engaged.push_back(s.engaged ? 1 : 0);
        rec.q_obj.push_back(s.q_obj);
        rec.p_obj.push_back(s.p_obj);

        if (ss.has_rest_length) {
            RestLengthController ctrl = ss.rest_length;
            ctrl.q_rl = vec1(s.q_rl);
            const TransformedState xbar =
                to_transformed(ctrl.transformed, {vec1(s.q), vec1(s.p), s.t});
            rec.phat.push_back(adapted_momentum(ctrl, xbar)[0]);
            rec.Hhat.push_back(storage_function(ctrl, xbar));
            const Vec z = power_balance_z(ctrl, xbar);
            analytic_power.push_back(-z.dot(power_balance_form(ctrl, xbar) * z));
            yhat_abs.push_back(std::abs(passive_output(ctrl, xbar)[0]));
        } else {
            rec.phat.push_back(0.0);
            rec.Hhat.push_back(0.0);
            analytic_power.push_back(0.0);
        }

        if (i == n_steps) break;

        const double* zoh_ptr = nullptr;
        if (use_zoh) {
            if (s.t >= next_zoh_time - 1e-12) {
                zoh_value = d.u;
                next_zoh_time += sc.zoh_period;
            }
            zoh_ptr = &zoh_value;
        }
        s = step(ss, s, dt, zoh_ptr);
    }

    // Power-balance residual per interior sample:
    // |d(Ĥ)/dt − (−zᵀUz)| / max(|analytic|, |fd|, 1e-6).
    rec.pb_residual.assign(rec.size(), 0.0);
    if (ss.has_rest_length) {
        for (std::size_t i = 1; i + 1 < rec.size(); ++i) {
            const double fd = (rec.Hhat[i + 1] - rec.Hhat[i - 1]) / (2 * dt);
            const double a = analytic_power[i];
            rec.pb_residual[i] =
                std::abs(fd - a) / std::max({std::abs(a), std::abs(fd), 1e-6});
        }
    }

    // Indices within 3 steps after an engagement switch are excluded from
    // monitor checks (non-smooth coupling breaks smoothness assumptions).
    auto near_switch = [&](std::size_t i) {
        for (std::size_t k = (i >= 3 ? i - 3 : 0); k <= i; ++k) {
            if (k > 0 && rec.engaged[k] != rec.engaged[k - 1]) return true;
        }
        return i + 1 < rec.size() && rec.engaged[i + 1] != rec.engaged[i];
    };

    if (ss.has_rest_length) {
        double max_hhat = 0.0;
        for (double h : rec.Hhat) max_hhat = std::max(max_hhat, std::abs(h));
        std::size_t violations = 0;
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < rec.size(); ++i) {
            if (near_switch(i)) continue;
            const double inc = rec.Hhat[i + 1] - rec.Hhat[i];
            if (inc > 1e-8 * max_hhat) {
                ++violations;
                worst = std::max(worst, inc);
            }
        }
        if (violations > 0) {
            std::ostringstream msg;
            msg << "lyapunov: Hhat increased on " << violations
                << " steps (max increase " << worst << ")";
            rec.meta.warnings.push_back(msg.str());
        }

        // Zero-state detectability heuristic: flat output, non-converging state.
        const std::size_t tail = rec.size() / 5;
        if (tail > 0) {
            double max_tail_y = 0.0;
            for (std::size_t i = rec.size() - tail; i < rec.size(); ++i)
                max_tail_y = std::max(max_tail_y, yhat_abs[i]);
            if (max_tail_y < 1e-9 && std::abs(rec.qbar.back()) > 1e-3)
                rec.meta.warnings.push_back(
                    "detectability: output is zero but state has not converged");
        }
    }

    // Energy audit: analytic dH/dt = −q̇ᵀDq̇ + yᵀu + q̇ᵀB f_e vs finite
    // differences of the recorded H.
    {
        std::size_t violations = 0;
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < rec.size(); ++i) {
            if (near_switch(i)) continue;
            const double qdot = rec.p[i] / sc.gripper.m_g;
            const double analytic =
                -qdot * sc.gripper.d_g * qdot + qdot * rec.u[i] + qdot * rec.f_e[i];
            const double fd = (rec.H[i + 1] - rec.H[i - 1]) / (2 * dt);
            const double rel = std::abs(fd - analytic) /
                               std::max({std::abs(analytic), std::abs(fd), 1e-6});
            if (rel > 1e-5) {
                ++violations;
                worst = std::max(worst, rel);
            }
        }
        if (violations > 0) {
            std::ostringstream msg;
            msg << "energy_audit: dH/dt mismatch on " << violations
                << " steps (worst rel err " << worst << ")";
            rec.meta.warnings.push_back(msg.str());
        }
    }

    return rec;
}

Metrics compute_metrics(const RunRecord& rec, double f_d, double window, double band) {
    Metrics m;
    const std::size_t n = rec.size();
    std::size_t ic = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (rec.engaged[i]) {
            ic = i;
            break;
        }
    }
    if (ic == n) return m;  // no contact: metrics flagged absent
    m.contact = true;
    m.contact_time = rec.t[ic];

    for (std::size_t i = ic; i < n && rec.t[i] <= m.contact_time + window; ++i)
        m.impact_force = std::max(m.impact_force, std::abs(rec.f_e[i]));

    m.steady_state_error = std::abs(rec.f_e.back() - f_d);

    std::size_t first_bad_after = n;  // index after the last out-of-band sample
    for (std::size_t i = n; i-- > 0;) {
        if (std::abs(rec.f_e[i] - f_d) > band) {
            first_bad_after = i + 1;
            break;
        }
        first_bad_after = i;
    }
    if (first_bad_after < n) {
        m.settled = true;
        m.settling_time = rec.t[first_bad_after];
    }
    return m;
}

std::string metrics_to_string(const Metrics& m) {
    std::ostringstream out;
    if (!m.contact) {
        out << "contact=none";
        return out.str();
    }
    out << "contact_time=" << m.contact_time << " impact_force=" << m.impact_force;
    if (m.settled)
        out << " settling_time=" << m.settling_time;
    else
        out << " settling_time=never";
    out << " steady_state_error=" << m.steady_state_error;
    return out.str();
}

}  // namespace phgrasp
