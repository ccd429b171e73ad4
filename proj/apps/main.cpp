// phgrasp — scenario runner for the variable rest-length impedance grasping
// study. Subcommands: run, compare, sweep, verify.
// Exit codes: 0 ok, 2 config error, 3 numerical failure,
//             4 verification failure (verify only).

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phgrasp/sim.hpp"
#include "phgrasp/svg_plot.hpp"
#include "phgrasp/verify.hpp"

namespace fs = std::filesystem;
using namespace phgrasp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerify = 4;

// Accepts a JSON file path, a bare preset name, or a preset-style path like
// "presets/rigid_restlength" (with or without the .json suffix).
Scenario resolve_scenario(const std::string& arg) {
    if (fs::exists(arg) && fs::is_regular_file(arg)) return load_scenario(arg);
    if (fs::exists(arg + ".json")) return load_scenario(arg + ".json");
    std::string base = fs::path(arg).filename().string();
    if (base.size() > 5 && base.ends_with(".json")) base.resize(base.size() - 5);
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), base) != names.end())
        return preset_scenario(base);
    throw ContractViolation("unknown scenario '" + arg +
                            "': not a file and not a bundled preset (presets: " +
                            [&] {
                                std::string s;
                                for (const auto& n : names) s += n + " ";
                                return s;
                            }() +
                            ")");
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

void print_metrics_row(const std::string& name, const Metrics& m) {
    std::cout << "  " << name << ": ";
    if (!m.contact) {
        std::cout << "no contact\n";
        return;
    }
    std::cout << "contact_time=" << fmt(m.contact_time)
              << "s impact_force=" << fmt(m.impact_force) << "N";
    if (m.settled) std::cout << " settling_time=" << fmt(m.settling_time) << "s";
    else std::cout << " settling_time=none";
    std::cout << " steady_state_error=" << fmt(m.steady_state_error) << "N\n";
}

void emit_artifacts(const RunRecord& rec, const Scenario& sc, const fs::path& out_dir,
                    bool plot) {
    fs::create_directories(out_dir);
    const std::string stem = sc.name.empty() ? "run" : sc.name;
    rec.write_csv((out_dir / (stem + ".csv")).string());
    rec.write_event_log((out_dir / (stem + ".events.log")).string());
    if (plot) {
        PlotSpec pos;
        pos.title = stem + ": gripper position";
        pos.x_label = "t [s]";
        pos.y_label = "q [rad]";
        pos.series.push_back({"q", "#1f77b4", rec.t, rec.q});
        pos.series.push_back(
            {"q_f", "#999999", {rec.t.front(), rec.t.back()}, {sc.q_f(), sc.q_f()}});
        write_svg(pos, (out_dir / (stem + "_position.svg")).string());

        PlotSpec force;
        force.title = stem + ": grasping force";
        force.x_label = "t [s]";
        force.y_label = "f_e [N]";
        force.series.push_back({"f_e", "#d62728", rec.t, rec.f_e});
        force.series.push_back(
            {"f_d", "#999999", {rec.t.front(), rec.t.back()}, {sc.f_d, sc.f_d}});
        write_svg(force, (out_dir / (stem + "_force.svg")).string());
    }
}

// Assigns a dotted-path field ("compliant.m_c", "rest_length.K_rl", "f_d", ...)
// in the scenario's JSON form, preserving schema validation on re-parse.
Scenario with_param(const Scenario& sc, const std::string& path, double value) {
    nlohmann::json j = nlohmann::json::parse(scenario_to_json_string(sc));
    nlohmann::json* node = &j;
    std::istringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    require(!parts.empty(), "sweep: empty parameter path");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->contains(parts[i]))
            throw ContractViolation("sweep: no such field '" + path + "'");
        node = &(*node)[parts[i]];
    }
    if (!node->contains(parts.back()))
        throw ContractViolation("sweep: no such field '" + path + "'");
    (*node)[parts.back()] = value;
    return scenario_from_json_string(j.dump());
}

int cmd_run(const std::string& scenario_arg, bool plot, double dt, double t_end,
            const std::string& out_dir, double zoh) {
    Scenario sc = resolve_scenario(scenario_arg);
    if (dt > 0) sc.integrator.dt = dt;
    if (t_end > 0) sc.integrator.t_end = t_end;
    if (zoh > 0) sc.zoh_period = zoh;
    sc.validate();
    const RunRecord rec = run(sc);
    emit_artifacts(rec, sc, out_dir, plot);
    const Metrics m = compute_metrics(rec, sc.f_d);
    std::cout << "scenario " << sc.name << " (" << rec.meta.controller_type << ", "
              << rec.meta.object_type << "), dt=" << sc.integrator.dt
              << "s, t_end=" << sc.integrator.t_end << "s\n";
    print_metrics_row("metrics", m);
    for (const auto& w : rec.meta.warnings) std::cout << "  warning: " << w << "\n";
    std::cout << "artifacts written to " << out_dir << "/\n";
    return kExitOk;
}

int cmd_compare(const std::vector<std::string>& scenario_args) {
    std::cout << "controller/scenario        contact[s]  impact[N]  settle[s]  sse[N]\n";
    std::vector<std::pair<std::string, Metrics>> rows;
    for (const auto& arg : scenario_args) {
        const Scenario sc = resolve_scenario(arg);
        const RunRecord rec = run(sc);
        const Metrics m = compute_metrics(rec, sc.f_d);
        rows.emplace_back(sc.name, m);
        std::ostringstream line;
        line.setf(std::ios::left);
        line.width(26);
        line << sc.name;
        auto cell = [&](const std::string& s) {
            std::ostringstream c;
            c.setf(std::ios::left);
            c.width(11);
            c << s;
            return c.str();
        };
        line << cell(m.contact ? fmt(m.contact_time) : "-")
             << cell(m.contact ? fmt(m.impact_force) : "-")
             << cell(m.settled ? fmt(m.settling_time) : "-")
             << (m.contact ? fmt(m.steady_state_error) : "-");
        std::cout << line.str() << "\n";
    }
    // Ordering note when the three study controllers are all present.
    if (rows.size() >= 2) {
        bool all_contact = true;
        for (const auto& [n, m] : rows) all_contact = all_contact && m.contact;
        if (all_contact) {
            bool ordered = true;
            for (std::size_t i = 1; i < rows.size(); ++i)
                ordered = ordered &&
                          rows[i - 1].second.impact_force <= rows[i].second.impact_force;
            std::cout << "impact-force ordering (as listed): "
                      << (ordered ? "non-decreasing" : "NOT monotone") << "\n";
        }
    }
    return kExitOk;
}

int cmd_sweep(const std::string& scenario_arg, const std::string& param) {
    const auto eq = param.find('=');
    require(eq != std::string::npos && eq > 0,
            "sweep: --param expects <path>=<v1,v2,...>");
    const std::string path = param.substr(0, eq);
    std::vector<double> values;
    {
        std::istringstream ss(param.substr(eq + 1));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                std::size_t used = 0;
                const double v = std::stod(tok, &used);
                require(used == tok.size(), "sweep: bad value '" + tok + "'");
                values.push_back(v);
            } catch (const std::invalid_argument&) {
                throw ContractViolation("sweep: bad value '" + tok + "'");
            }
        }
    }
    require(!values.empty(), "sweep: no values given");

    const Scenario base = resolve_scenario(scenario_arg);
    std::vector<Scenario> scenarios;
    for (double v : values) scenarios.push_back(with_param(base, path, v));

    struct Row {
        double value;
        Metrics m;
        std::string error;
    };
    std::vector<Row> rows(values.size());
    std::mutex err_mutex;
    bool numerical_failure = false;

    // Each worker owns its scenario and row; no shared mutable state.
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_workers = std::min<std::size_t>(hw, values.size());
    std::vector<std::thread> workers;
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < n_workers; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < scenarios.size();
                 i = next.fetch_add(1)) {
                rows[i].value = values[i];
                try {
                    const RunRecord rec = run(scenarios[i]);
                    rows[i].m = compute_metrics(rec, scenarios[i].f_d);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    rows[i].error = e.what();
                    numerical_failure = true;
                }
            }
        });
    }
    for (auto& t : workers) t.join();

    std::cout << "sweep " << base.name << " over " << path << "\n";
    std::cout << path << "  contact[s]  impact[N]  settle[s]  sse[N]\n";
    for (const auto& r : rows) {
        std::cout << fmt(r.value) << "  ";
        if (!r.error.empty()) {
            std::cout << "error: " << r.error << "\n";
            continue;
        }
        if (!r.m.contact) {
            std::cout << "no contact\n";
            continue;
        }
        std::cout << fmt(r.m.contact_time) << "      " << fmt(r.m.impact_force)
                  << "     " << (r.m.settled ? fmt(r.m.settling_time) : "-")
                  << "      " << fmt(r.m.steady_state_error) << "\n";
    }
    return numerical_failure ? kExitNumerical : kExitOk;
}

int cmd_verify() {
    const auto results = verify::run_property_checks();
    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  [" << r.criterion << "] "
                  << r.name << " — " << r.detail << "\n";
        all_pass = all_pass && r.pass;
    }
    return all_pass ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variable rest-length impedance grasping simulator"};
    app.require_subcommand(1);

    std::string run_scenario, out_dir = "out";
    bool plot = false;
    double dt = 0, t_end = 0, zoh = 0;
    auto* run_cmd = app.add_subcommand("run", "Run one scenario, emit CSV/plots");
    run_cmd->add_option("scenario", run_scenario, "Preset name or JSON path")
        ->required();
    run_cmd->add_flag("--plot", plot, "Emit position/force SVG plots");
    run_cmd->add_option("--dt", dt, "Override step size [s]")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--t-end", t_end, "Override horizon [s]")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--out", out_dir, "Output directory");
    run_cmd->add_option("--zoh", zoh, "Zero-order-hold control period [s]")
        ->check(CLI::PositiveNumber);

    std::vector<std::string> cmp_scenarios;
    auto* cmp_cmd = app.add_subcommand("compare", "Run scenarios, print metrics table");
    cmp_cmd->add_option("scenarios", cmp_scenarios, "Preset names or JSON paths")
        ->required();

    std::string sweep_scenario, sweep_param;
    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one parameter in parallel");
    sweep_cmd->add_option("scenario", sweep_scenario, "Preset name or JSON path")
        ->required();
    sweep_cmd->add_option("--param", sweep_param, "<path>=<v1,v2,...>")->required();

    auto* verify_cmd =
        app.add_subcommand("verify", "Run the property/invariant suite headlessly");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run_cmd->parsed())
            return cmd_run(run_scenario, plot, dt, t_end, out_dir, zoh);
        if (cmp_cmd->parsed()) return cmd_compare(cmp_scenarios);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_scenario, sweep_param);
        if (verify_cmd->parsed()) return cmd_verify();
    } catch (const ContractViolation& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitConfig;
}
