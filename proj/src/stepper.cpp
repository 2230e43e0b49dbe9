#include "sgeuler/stepper.hpp"

#include "sgeuler/coriolis.hpp"

namespace sgeuler {

VectorField rotation_source(const GeopotentialState& s) {
    const GridSpec& g = s.spec();
    VectorField f(g);
    for (std::size_t c = 0; c < f.size(); ++c) f[c] = apply_j(s.grad()[c] - g.center(g.cell(c)));
    return f;
}

DarcySolution velocity(const GeopotentialState& s, const SolverOptions& opts, double p) {
    const DivCurlData d(s.hess(), rotation_source(s));
    return solve_divcurl(d, opts, p);
}

StepResult step(const GeopotentialState& s, double epsilon, const SolverOptions& opts, double p) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("time step must be positive");
    if (!(s.lambda_min() > 0.0)) {
        throw StepRefused("state is not convex (lambda_min " + std::to_string(s.lambda_min()) + " at cell " +
                          to_string(s.lambda_argmin()) + ")");
    }
    try {
        DarcySolution sol = velocity(s, opts, p);
        GeopotentialState next = apply_potential_update(s, sol.q, epsilon);
        return {std::move(next), std::move(sol)};
    } catch (const SolverFailure& e) {
        throw StepRefused(std::string("solver failure: ") + e.what());
    } catch (const EllipticityError& e) {
        throw StepRefused(e.what());
    } catch (const SingularCellError& e) {
        throw StepRefused(e.what());
    }
}

std::string to_string(HaltReason r) {
    switch (r) {
        case HaltReason::Completed: return "completed";
        case HaltReason::ConvexityFloor: return "convexity_floor";
        case HaltReason::SolverFailure: return "solver_failure";
        case HaltReason::StepRefused: return "step_refused";
    }
    return "unknown";
}

namespace {

DarcySolution solve_at(const GeopotentialState& s, const SchemeConfig& config, double p) {
    if (config.coriolis != nullptr) return coriolis_velocity(s, *config.coriolis, config.solver, p);
    return velocity(s, config.solver, p);
}

}  // namespace

RunResult run(const GeopotentialState& s0, const SchemeConfig& config, const SchemeConstants& constants,
              const StateObserver& observer) {
    if (!(config.epsilon > 0.0)) throw std::invalid_argument("time step must be positive");
    if (config.steps < 0) throw std::invalid_argument("step count must be non-negative");
    if (config.log_every < 1) throw std::invalid_argument("log cadence must be at least 1");

    RunResult out;
    auto current = std::make_shared<const GeopotentialState>(s0);
    out.trajectory.push_back(current);
    bool failed = false;

    for (int j = 0; j < config.steps; ++j) {
        std::optional<DarcySolution> sol;
        try {
            sol = solve_at(*current, config, constants.p);
        } catch (const SolverFailure& e) {
            out.halt = HaltReason::SolverFailure;
            out.halt_detail = e.what();
        } catch (const std::runtime_error& e) {
            out.halt = HaltReason::StepRefused;
            out.halt_detail = e.what();
        }
        if (!sol) {
            failed = true;
            break;
        }
        if (j % config.log_every == 0) out.records.push_back(emit_record(j, *current, &*sol, constants));
        if (observer) observer(j, *current, &*sol);

        current = std::make_shared<const GeopotentialState>(apply_potential_update(*current, sol->q, config.epsilon));
        out.trajectory.push_back(current);
        out.steps_taken = j + 1;

        if (config.halt_below_half_lambda0 && current->lambda_min() < 0.5 * current->lambda0()) {
            out.halt = HaltReason::ConvexityFloor;
            out.halt_detail = "lambda_min " + std::to_string(current->lambda_min()) + " below lambda0/2 at cell " +
                              to_string(current->lambda_argmin());
            break;
        }
    }

    // Final state: diagnostic solve only, no update.
    std::optional<DarcySolution> last;
    if (!failed) {
        try {
            last = solve_at(*current, config, constants.p);
        } catch (const std::runtime_error&) {
        }
    }
    const DarcySolution* lp = last ? &*last : nullptr;
    out.records.push_back(emit_record(out.steps_taken, *current, lp, constants));
    if (observer) observer(out.steps_taken, *current, lp);
    return out;
}

std::vector<BoundCheck> growth_bound_check(const Trajectory& trajectory, const SchemeConstants& constants) {
    std::vector<BoundCheck> out;
    if (trajectory.empty()) return out;
    const double rate = 1.0 + 2.0 * constants.c_star;
    const double base = constants.kappa + constants.grad_norm0;
    double factor = 1.0;
    for (std::size_t j = 0; j < trajectory.size(); ++j) {
        if (j > 0) factor *= 1.0 + rate * (trajectory[j]->time() - trajectory[j - 1]->time());
        BoundCheck b;
        b.value = sobolev_norm(trajectory[j]->potential(), 3, constants.p);
        b.bound = base * factor - constants.kappa;
        b.ok = b.value <= b.bound + 1e-12 * std::abs(b.bound);
        out.push_back(b);
    }
    return out;
}

}  // namespace sgeuler
