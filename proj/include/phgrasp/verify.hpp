#pragma once

// Headless verification suite: the property/invariant checks behind the
// `verify` command, plus the quantitative reproduction checks used by the
// acceptance runner. Each check returns a pass/fail result with measured
// values so failures are diagnosable from the output alone.

#include <string>
#include <vector>

namespace phgrasp::verify {

struct CheckResult {
    int criterion = 0;  // 1..12
    std::string name;
    bool pass = false;
    std::string detail;
};

// Quantitative reproduction checks (preset scenarios, pinned tolerances).
CheckResult check_contact_times();        // 1
CheckResult check_rigid_impacts();        // 2
CheckResult check_compliant_metrics();    // 3
CheckResult check_rigid_settling();       // 4
CheckResult check_steady_state_error();   // 5

// Property-based checks.
CheckResult check_specialization_identity();  // 6
CheckResult check_lyapunov();                 // 7
CheckResult check_power_balance();            // 8
CheckResult check_structure();                // 9
CheckResult check_gradients();                // 10
CheckResult check_energy();                   // 11
CheckResult check_convergence();              // 12

// Criteria 6..12 (the `verify` command's suite).
std::vector<CheckResult> run_property_checks();
// All twelve criteria in order.
std::vector<CheckResult> run_acceptance_criteria();

}  // namespace phgrasp::verify
