#pragma once

// Forward Euler stepping of the generalised geopotential. One step:
//
//     f = J(grad P - x),   curl(D^2P u) = curl f,  div u = 0,  u . n = 0,
//     D^2P u - f = grad q,  P <- P - epsilon q.
//
// Storing P rather than grad P keeps the transported field a discrete
// gradient after every step.

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgeuler/diagnostics.hpp"
#include "sgeuler/divcurl.hpp"
#include "sgeuler/geopotential.hpp"

namespace sgeuler {

class CoriolisField;

/// A step that could not be taken; the input state is untouched.
class StepRefused : public std::runtime_error {
public:
    explicit StepRefused(const std::string& what) : std::runtime_error(what) {}
};

struct StepResult {
    GeopotentialState next;
    DarcySolution solution;
};

/// J(grad P - x) per cell.
VectorField rotation_source(const GeopotentialState& s);

/// The velocity solve of a step without the update.
DarcySolution velocity(const GeopotentialState& s, const SolverOptions& opts = {}, double p = 4.0);

/// Throws StepRefused when lambda_min <= 0 or the solve fails.
StepResult step(const GeopotentialState& s, double epsilon, const SolverOptions& opts = {}, double p = 4.0);

struct SchemeConfig {
    double epsilon = 0.01;
    int steps = 100;
    SolverOptions solver;
    bool halt_below_half_lambda0 = true;
    int log_every = 1;
    const CoriolisField* coriolis = nullptr;  // null: constant rotation
};

enum class HaltReason { Completed, ConvexityFloor, SolverFailure, StepRefused };

std::string to_string(HaltReason r);

struct RunResult {
    Trajectory trajectory;
    std::vector<DiagnosticsRecord> records;
    HaltReason halt = HaltReason::Completed;
    std::string halt_detail;
    int steps_taken = 0;
};

/// Observer called once per state in order, with the velocity solved at
/// that state (null when none could be computed).
using StateObserver = std::function<void(int step, const GeopotentialState&, const DarcySolution*)>;

/// Runs config.steps steps or halts early. Records are emitted for every
/// state whose index is a multiple of log_every, and for the final state.
RunResult run(const GeopotentialState& s0, const SchemeConfig& config, const SchemeConstants& constants,
              const StateObserver& observer = {});

/// |grad P_j|_{W^{3,p}} against (kappa + |grad P_0|)(1 + (1 + 2c*) eps)^j - kappa,
/// using sobolev_norm(P, 3, p) and the trajectory's own time steps.
std::vector<BoundCheck> growth_bound_check(const Trajectory& trajectory, const SchemeConstants& constants);

}  // namespace sgeuler
