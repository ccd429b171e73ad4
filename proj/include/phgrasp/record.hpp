#pragma once

#include <string>
#include <vector>

namespace phgrasp {

// Time-indexed trajectory of one run. All columns share the uniform grid in t.
struct RunRecord {
    std::vector<double> t;
    std::vector<double> q;
    std::vector<double> p;
    std::vector<double> q_rl;
    std::vector<double> qbar;
    std::vector<double> phat;
    std::vector<double> f_e;
    std::vector<double> u;     // applied control (v for rest-length, u for Hogan)
    std::vector<double> H;     // plant Hamiltonian
    std::vector<double> Hhat;  // controller storage function (0 for Hogan runs)
    std::vector<double> pb_residual;  // power-balance residual (0 for Hogan runs)
    std::vector<int> engaged;
    // Compliant-object state (kept for monitors; not part of the CSV schema).
    std::vector<double> q_obj;
    std::vector<double> p_obj;

    struct Metadata {
        std::string scenario_name;
        std::string controller_type;
        std::string object_type;
        bool grad_is_finite_difference = false;
        double q_rl0 = 0.0;
        double dt = 0.0;
        double t_end = 0.0;
        double f_d = 0.0;
        double engage_position = 0.0;
        std::vector<std::string> decisions;  // per-run decision notes
        std::vector<std::string> warnings;   // monitor warnings
    } meta;

    std::size_t size() const { return t.size(); }

    // Fixed column order:
    // t, q, p, q_rl, qbar, phat, f_e, u, H, Hhat, pb_residual, engaged
    void write_csv(const std::string& path) const;
    std::string csv_string() const;

    // Line-delimited event log (engagement switches, warnings, metadata).
    void write_event_log(const std::string& path) const;
};

}  // namespace phgrasp
