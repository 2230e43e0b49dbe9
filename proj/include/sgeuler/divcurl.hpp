#pragma once

// Variable-coefficient div-curl systems
//
//     curl(A u) = curl f,   div u = 0,   u . n = 0 on the boundary,
//
// on a simply connected box. Writing A u - f = grad q turns the system into
// one scalar Neumann problem for q,
//
//     -div(M grad q) = div(M f),   M (grad q + f) . n = 0,   M = A^{-1},
//
// discretised by cell-centred finite volumes: each interior face carries
// the normal component of M(grad q + f), with the normal derivative taken
// across the face and the tangential derivatives averaged from the two
// adjacent cells; boundary faces carry zero flux. The interior stencil has
// 19 points. The velocity is recovered per cell as u = M(f + grad q).

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgeuler/grid.hpp"
#include "sgeuler/sparse.hpp"

namespace sgeuler {

class SingularCellError : public std::runtime_error {
public:
    SingularCellError(const CellIndex& cell, double det)
        : std::runtime_error("singular coefficient at cell " + to_string(cell) + " (det=" + std::to_string(det) + ")"),
          cell_(cell), det_(det) {}
    const CellIndex& cell() const { return cell_; }
    double det() const { return det_; }

private:
    CellIndex cell_;
    double det_;
};

class EllipticityError : public std::runtime_error {
public:
    EllipticityError(const CellIndex& cell, double eigenvalue)
        : std::runtime_error("coefficient loses ellipticity at cell " + to_string(cell) +
                             " (min eigenvalue of symmetric part " + std::to_string(eigenvalue) + ")"),
          cell_(cell), eigenvalue_(eigenvalue) {}
    const CellIndex& cell() const { return cell_; }
    double eigenvalue() const { return eigenvalue_; }

private:
    CellIndex cell_;
    double eigenvalue_;
};

/// Per-cell closed-form inverse. Throws SingularCellError when
/// |det| < 1e-12 * |A|_F^3 in some cell.
TensorField invert_3x3(const TensorField& t);

/// Coefficient A and curl-source potential f of one div-curl system.
class DivCurlData {
public:
    /// Validates finiteness and uniform positivity of the symmetric part of
    /// A; throws EllipticityError naming the worst cell otherwise.
    DivCurlData(TensorField a, VectorField f);

    const TensorField& a() const { return a_; }
    const VectorField& f() const { return f_; }
    const GridSpec& spec() const { return a_.spec(); }
    bool symmetric() const { return a_.symmetric(); }
    /// Smallest eigenvalue of sym(A) over the grid.
    const EigenMin& ellipticity() const { return lambda_; }

private:
    TensorField a_;
    VectorField f_;
    EigenMin lambda_;
};

struct DarcyProblem {
    TensorField m;            // A^{-1}
    VectorField f;            // curl-source potential
    CsrMatrix op;             // q -> -div(M grad q) with zero-flux closure
    std::vector<double> rhs;  // div(M f) with zero-flux closure; sums to zero
    ScalarField source;       // -div(M f) with linearly extrapolated boundary faces
    double boundary_flux;     // outward flux of M f through the box boundary

    DarcyProblem(TensorField m_, VectorField f_, CsrMatrix op_, std::vector<double> rhs_, ScalarField source_,
                 double boundary_flux_)
        : m(std::move(m_)), f(std::move(f_)), op(std::move(op_)), rhs(std::move(rhs_)), source(std::move(source_)),
          boundary_flux(boundary_flux_) {}
};

DarcyProblem reduce_to_darcy(const DivCurlData& d);

struct SolverOptions {
    double tol = 1e-10;  // relative residual
    int maxiter = 0;     // 0: ten times the cell count
};

/// Estimate ratios |u|_{W^{1,p}} / |F|_{L^p} and |Au|_{W^{1,p}} / |F|_{L^p}
/// with F = curl f. Not applicable when F vanishes.
struct EstimateRatios {
    bool applicable = false;
    double u_ratio = 0.0;
    double au_ratio = 0.0;
};

struct DarcySolution {
    ScalarField q;
    VectorField u;
    KrylovMethod method = KrylovMethod::ConjugateGradient;
    int iterations = 0;
    double residual = 0.0;  // true relative residual |b - Lq| / |b|
    std::vector<double> residual_history;
    /// max over cells of the finite-volume divergence of the face fluxes
    /// M(grad q + f) . n; zero up to the solver tolerance.
    double flux_divergence = 0.0;
    EstimateRatios estimates;
};

/// CG when the assembled operator is exactly symmetric, BiCGStab otherwise.
/// Throws SolverFailure (with the residual history) on non-convergence.
DarcySolution solve_darcy(const DarcyProblem& p, const SolverOptions& opts = {});

/// u = A^{-1}(f + grad q) per cell.
VectorField recover_velocity(const DivCurlData& d, const ScalarField& q);

EstimateRatios verify_estimate(const VectorField& u, const DivCurlData& d, double p);

/// reduce_to_darcy + solve_darcy + estimate ratios at exponent p.
DarcySolution solve_divcurl(const DivCurlData& d, const SolverOptions& opts = {}, double p = 4.0);

}  // namespace sgeuler
