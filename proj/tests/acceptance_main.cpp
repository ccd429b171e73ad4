// Acceptance runner: executes the twelve quantitative and property-based
// criteria, printing one PASS/FAIL line per criterion. With --criterion N it
// runs only criterion N (used to register each criterion as its own test).
// Exit code is the number of failing criteria (0 = all pass).

#include <cstdlib>
#include <iostream>
#include <string>

#include "phgrasp/verify.hpp"

using phgrasp::verify::CheckResult;

namespace {

CheckResult run_criterion(int n) {
    using namespace phgrasp::verify;
    switch (n) {
        case 1: return check_contact_times();
        case 2: return check_rigid_impacts();
        case 3: return check_compliant_metrics();
        case 4: return check_rigid_settling();
        case 5: return check_steady_state_error();
        case 6: return check_specialization_identity();
        case 7: return check_lyapunov();
        case 8: return check_power_balance();
        case 9: return check_structure();
        case 10: return check_gradients();
        case 11: return check_energy();
        case 12: return check_convergence();
        default:
            std::cerr << "criterion must be in 1..12\n";
            std::exit(2);
    }
}

void print(const CheckResult& r) {
    std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << r.criterion << ": "
              << r.name << " — " << r.detail << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::cerr << "usage: acceptance [--criterion N]\n";
            return 2;
        }
    }

    int failures = 0;
    try {
        if (only != 0) {
            const CheckResult r = run_criterion(only);
            print(r);
            if (!r.pass) ++failures;
        } else {
            for (int n = 1; n <= 12; ++n) {
                const CheckResult r = run_criterion(n);
                print(r);
                if (!r.pass) ++failures;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "acceptance: aborted with exception: " << e.what() << "\n";
        return 99;
    }
    return failures;
}
