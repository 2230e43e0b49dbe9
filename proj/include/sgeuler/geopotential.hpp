#pragma once

// Generalised geopotential P on the grid, with the caches every step needs
// (grad P, D^2 P, convexity modulus), the initial-data presets, and the
// constants that fix the guaranteed existence horizon.

#include <optional>
#include <stdexcept>
#include <string>

#include "sgeuler/divcurl.hpp"
#include "sgeuler/grid.hpp"

namespace sgeuler {

class NonConvexError : public std::runtime_error {
public:
    NonConvexError(const CellIndex& cell, double eigenvalue)
        : std::runtime_error("potential is not uniformly convex: eigenvalue " + std::to_string(eigenvalue) +
                             " at cell " + to_string(cell)),
          cell_(cell), eigenvalue_(eigenvalue) {}
    const CellIndex& cell() const { return cell_; }
    double eigenvalue() const { return eigenvalue_; }

private:
    CellIndex cell_;
    double eigenvalue_;
};

/// Immutable snapshot of the scheme. P is kept mean-zero; the caches are
/// recomputed from P whenever a state is built.
class GeopotentialState {
public:
    /// Normalises the mean of p and computes the caches. lambda0 defaults to
    /// the measured convexity modulus of p.
    static GeopotentialState create(ScalarField p, double time, std::optional<double> lambda0 = std::nullopt);

    const GridSpec& spec() const { return p_.spec(); }
    const ScalarField& potential() const { return p_; }
    const VectorField& grad() const { return grad_; }
    const TensorField& hess() const { return hess_; }
    double time() const { return time_; }
    double lambda_min() const { return lambda_min_.value; }
    const CellIndex& lambda_argmin() const { return lambda_min_.cell; }
    double lambda0() const { return lambda0_; }

private:
    GeopotentialState(ScalarField p, VectorField grad, TensorField hess, double time, EigenMin lmin, double lambda0);

    ScalarField p_;
    VectorField grad_;
    TensorField hess_;
    double time_;
    EigenMin lambda_min_;
    double lambda0_;
};

struct Preset {
    enum class Kind { Identity, Tilt, Quadratic, Bump };

    Kind kind = Kind::Identity;
    Vec3 tilt{0.0, 0.0, 0.0};     // P = |x|^2/2 + a.x
    Vec3 quad{1.0, 1.0, 1.0};     // P = x^T diag(q) x / 2
    double bump_delta = 0.0;      // P = |x|^2/2 + delta prod_i sin(k pi x_i)
    int bump_k = 1;

    static Preset identity() { return {}; }
    static Preset tilted(const Vec3& a);
    static Preset quadratic(const Vec3& q);
    static Preset bump(double delta, int k);
};

std::string to_string(Preset::Kind k);

ScalarField preset_potential(const Preset& preset, const GridSpec& spec);

/// Throws NonConvexError when the discrete Hessian is not positive
/// definite somewhere; lambda0 is the measured minimum eigenvalue.
GeopotentialState init_state(const ScalarField& p0);
GeopotentialState init_state(const Preset& preset, const GridSpec& spec);

/// P_next = P - epsilon q (mean re-normalised), time advanced by epsilon.
GeopotentialState apply_potential_update(const GeopotentialState& s, const ScalarField& q, double epsilon);

struct SchemeConstants {
    double p = 4.0;
    double lambda0 = 0.0;
    double omega = 0.0;        // |J id|_{W^{3,p}}
    double grad_norm0 = 0.0;   // sobolev_norm(P0, 3, p)
    double holder_alpha = 0.0; // 1 - 3/p
    double m_star = 0.0;       // C^{1,alpha} surrogate of D^2 P0 plus lambda0/6
    double c_star = 1.0;
    double c_m = 1.0;
    double kappa = 0.0;
    double tau_star = 0.0;
    double domain_volume = 0.0;
};

/// Needs p > 3, c_star > 0, c_m > 0 and at least 5 cells per axis.
SchemeConstants compute_constants(const GeopotentialState& s0, double p = 4.0, double c_star = 1.0, double c_m = 1.0);

/// max |D^2 P| (spectral) plus the largest Holder quotient
/// |D^2P(c + e_a) - D^2P(c)| / h_a^alpha over axis neighbours.
double c1alpha_surrogate(const TensorField& hess, double alpha);

/// The closed-form existence horizon for given constants.
double existence_time(double lambda0, double kappa, double grad_norm0, double c_star, double c_m);

}  // namespace sgeuler
