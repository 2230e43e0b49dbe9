#pragma once

// Spatially varying rotation. With K_f = diag(1/f, 1/f, 1) each step solves
//
//     curl(A u) = curl(K_f^{-1} J (grad P - x)),  div u = 0,  u . n = 0,
//     A = D^2 P - K_f^{-1} (grad P (x) grad f) / f^2,
//
// and updates P <- P - epsilon q as in the constant-rotation scheme. A is in
// general not symmetric; the step is refused unless the rank-one
// correction is dominated by half the convexity modulus in every cell.

#include <stdexcept>
#include <string>

#include "sgeuler/geopotential.hpp"
#include "sgeuler/stepper.hpp"

namespace sgeuler {

class PerturbationError : public std::runtime_error {
public:
    PerturbationError(const std::string& what, const CellIndex& cell, double ratio)
        : std::runtime_error(what + " at cell " + to_string(cell)), cell_(cell), ratio_(ratio) {}
    const CellIndex& cell() const { return cell_; }
    /// |rank-one term| / (lambda_min(D^2 P) / 2) at the worst cell.
    double ratio() const { return ratio_; }

private:
    CellIndex cell_;
    double ratio_;
};

class CoriolisField {
public:
    /// Throws std::invalid_argument unless f is finite and strictly positive.
    explicit CoriolisField(ScalarField f);

    static CoriolisField constant(const GridSpec& spec, double f0);
    /// f(x) = 1 + delta * x3.
    static CoriolisField profile(const GridSpec& spec, double delta);
    /// Text file: "nx ny nz" then nx*ny*nz values, x fastest. Dimensions must
    /// match the grid.
    static CoriolisField from_file(const GridSpec& spec, const std::string& path);

    const ScalarField& f() const { return f_; }
    const VectorField& grad() const { return grad_; }
    double f_min() const { return f_min_; }

private:
    ScalarField f_;
    VectorField grad_;
    double f_min_;
};

/// diag(f, f, 1) per cell.
TensorField kf_inverse(const CoriolisField& c);

/// A = D^2 P - K_f^{-1}(grad P (x) grad f)/f^2; symmetric flag set only
/// when the result is exactly symmetric (grad f == 0). Throws
/// PerturbationError when |rank-one term|_2 >= lambda_min(D^2 P)/2 in some
/// cell or the symmetric part is not positive definite.
TensorField assemble_coriolis_coefficient(const GeopotentialState& s, const CoriolisField& c);

/// K_f^{-1} J (grad P - x).
VectorField coriolis_source(const GeopotentialState& s, const CoriolisField& c);

StepResult step_coriolis(const GeopotentialState& s, const CoriolisField& c, double epsilon,
                         const SolverOptions& opts = {}, double p = 4.0);

/// The velocity solve of step_coriolis without the update.
DarcySolution coriolis_velocity(const GeopotentialState& s, const CoriolisField& c, const SolverOptions& opts = {},
                                double p = 4.0);

}  // namespace sgeuler
