#include "phgrasp/record.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "phgrasp/common.hpp"

namespace phgrasp {

namespace {

// Shortest round-trippable decimal representation, for byte-identical CSVs.
std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    double back;
    std::sscanf(buf, "%lf", &back);
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[32];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, x);
        std::sscanf(shorter, "%lf", &back);
        if (back == x) return shorter;
    }
    return buf;
}

}  // namespace

std::string RunRecord::csv_string() const {
    std::ostringstream out;
    out << "t,q,p,q_rl,qbar,phat,f_e,u,H,Hhat,pb_residual,engaged\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
        out << fmt(t[i]) << ',' << fmt(q[i]) << ',' << fmt(p[i]) << ','
            << fmt(q_rl[i]) << ',' << fmt(qbar[i]) << ',' << fmt(phat[i]) << ','
            << fmt(f_e[i]) << ',' << fmt(u[i]) << ',' << fmt(H[i]) << ','
            << fmt(Hhat[i]) << ',' << fmt(pb_residual[i]) << ',' << engaged[i]
            << '\n';
    }
    return out.str();
}

void RunRecord::write_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NumericalError("write_csv: cannot open " + path);
    out << csv_string();
}

void RunRecord::write_event_log(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NumericalError("write_event_log: cannot open " + path);
    out << "scenario=" << meta.scenario_name << "\n";
    out << "controller=" << meta.controller_type << "\n";
    out << "object=" << meta.object_type << "\n";
    out << "dt=" << fmt(meta.dt) << " t_end=" << fmt(meta.t_end)
        << " f_d=" << fmt(meta.f_d) << " engage=" << fmt(meta.engage_position)
        << "\n";
    out << "grad_is_finite_difference=" << (meta.grad_is_finite_difference ? 1 : 0)
        << "\n";
    for (const auto& d : meta.decisions) out << "decision: " << d << "\n";
    for (std::size_t i = 1; i < engaged.size(); ++i) {
        if (engaged[i] != engaged[i - 1])
            out << "event: t=" << fmt(t[i])
                << (engaged[i] ? " engage" : " disengage") << "\n";
    }
    for (const auto& w : meta.warnings) out << "warning: " << w << "\n";
}

}  // namespace phgrasp
