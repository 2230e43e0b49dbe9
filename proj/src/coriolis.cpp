#include "sgeuler/coriolis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace sgeuler {

CoriolisField::CoriolisField(ScalarField f) : f_(std::move(f)), grad_(f_.spec()), f_min_(0.0) {
    if (!all_finite(f_)) throw std::invalid_argument("Coriolis parameter must be finite");
    f_min_ = *std::min_element(f_.begin(), f_.end());
    if (!(f_min_ > 0.0)) {
        throw std::invalid_argument("Coriolis parameter must be strictly positive (min " + std::to_string(f_min_) + ")");
    }
    grad_ = gradient(f_);
}

CoriolisField CoriolisField::constant(const GridSpec& spec, double f0) {
    return CoriolisField(ScalarField(spec, f0));
}

CoriolisField CoriolisField::profile(const GridSpec& spec, double delta) {
    return CoriolisField(sample_scalar(spec, [delta](const Vec3& x) { return 1.0 + delta * x[2]; }));
}

CoriolisField CoriolisField::from_file(const GridSpec& spec, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open Coriolis file " + path);
    std::array<int, 3> dims{};
    if (!(in >> dims[0] >> dims[1] >> dims[2])) throw std::runtime_error("missing grid header in " + path);
    if (dims != spec.dims()) throw std::runtime_error("Coriolis file grid does not match the run grid: " + path);
    ScalarField f(spec);
    for (double& v : f) {
        if (!(in >> v)) throw std::runtime_error("too few values in " + path);
    }
    double extra = 0.0;
    if (in >> extra) throw std::runtime_error("too many values in " + path);
    return CoriolisField(std::move(f));
}

TensorField kf_inverse(const CoriolisField& c) {
    TensorField k(c.f().spec(), true);
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = diag3(c.f()[i], c.f()[i], 1.0);
    return k;
}

TensorField assemble_coriolis_coefficient(const GeopotentialState& s, const CoriolisField& c) {
    if (!(s.spec() == c.f().spec())) throw std::invalid_argument("Coriolis field and state use different grids");
    TensorField a(s.spec(), false);
    bool perturbed = false;
    double worst = 0.0;
    std::size_t worst_cell = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double f = c.f()[i];
        const Vec3 kg = {f * s.grad()[i][0], f * s.grad()[i][1], s.grad()[i][2]};
        const Vec3& gf = c.grad()[i];
        const double term = norm(kg) * norm(gf) / (f * f);
        const double half_lambda = 0.5 * symmetric_eigenvalues(s.hess()[i])[0];
        const double ratio = half_lambda > 0.0 ? term / half_lambda : std::numeric_limits<double>::infinity();
        if (ratio > worst || i == 0) {
            worst = ratio;
            worst_cell = i;
        }
        if (gf[0] != 0.0 || gf[1] != 0.0 || gf[2] != 0.0) perturbed = true;
        a[i] = s.hess()[i] - (1.0 / (f * f)) * outer(kg, gf);
    }
    if (!(worst < 1.0)) {
        throw PerturbationError("rotation gradient term is not dominated by half the convexity modulus",
                                s.spec().cell(worst_cell), worst);
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double lo = symmetric_eigenvalues(symmetric_part(a[i]))[0];
        if (!(lo > 0.0)) {
            throw PerturbationError("symmetric part of the rotation coefficient is not positive definite",
                                    s.spec().cell(i), worst);
        }
    }
    a.set_symmetric(!perturbed && s.hess().symmetric());
    return a;
}

VectorField coriolis_source(const GeopotentialState& s, const CoriolisField& c) {
    const GridSpec& g = s.spec();
    VectorField out(g);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Vec3 j = apply_j(s.grad()[i] - g.center(g.cell(i)));
        out[i] = {c.f()[i] * j[0], c.f()[i] * j[1], j[2]};
    }
    return out;
}

DarcySolution coriolis_velocity(const GeopotentialState& s, const CoriolisField& c, const SolverOptions& opts,
                                double p) {
    const DivCurlData d(assemble_coriolis_coefficient(s, c), coriolis_source(s, c));
    return solve_divcurl(d, opts, p);
}

StepResult step_coriolis(const GeopotentialState& s, const CoriolisField& c, double epsilon,
                         const SolverOptions& opts, double p) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("time step must be positive");
    if (!(s.lambda_min() > 0.0)) {
        throw StepRefused("state is not convex (lambda_min " + std::to_string(s.lambda_min()) + " at cell " +
                          to_string(s.lambda_argmin()) + ")");
    }
    try {
        DarcySolution sol = coriolis_velocity(s, c, opts, p);
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

}  // namespace sgeuler
