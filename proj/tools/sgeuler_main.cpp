#include <iostream>
#include <string>
#include <vector>

#include "sgeuler/experiment.hpp"

using namespace sgeuler;

namespace {

int report(const ExperimentResult& r, const RunConfig& cfg) {
    if (!r.error.empty()) {
        std::cerr << "sgeuler: " << r.error << '\n';
        return r.exit_code;
    }
    std::cout << cfg.out << ": " << to_string(r.halt) << " after " << r.steps_taken << " of " << r.schedule.steps
              << " steps (epsilon " << format_double(r.schedule.epsilon) << ", tau* "
              << format_double(r.constants.tau_star) << ")";
    if (!r.halt_detail.empty()) std::cout << ": " << r.halt_detail;
    std::cout << '\n';
    return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    try {
        const ParsedCommand cmd = parse_command(args);
        if (cmd.sweep_file) {
            std::vector<std::string> base;
            for (std::size_t i = 0; i < args.size(); ++i) {
                if (args[i] == "--sweep") {
                    ++i;
                } else if (args[i].rfind("--sweep=", 0) != 0) {
                    base.push_back(args[i]);
                }
            }
            const auto results = run_sweep(*cmd.sweep_file, base);
            int code = 0;
            for (const auto& r : results) {
                if (!r.error.empty()) std::cerr << "sgeuler: " << r.error << '\n';
                code = std::max(code, r.exit_code);
            }
            std::cout << results.size() << " runs finished\n";
            return code;
        }
        return report(run_experiment(cmd.config), cmd.config);
    } catch (const HelpRequested& h) {
        std::cout << h.what();
        return 0;
    } catch (const UsageError& e) {
        for (const auto& p : e.problems()) std::cerr << "sgeuler: " << p << '\n';
        std::cerr << "run with --help for usage\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "sgeuler: " << e.what() << '\n';
        return 1;
    }
}
