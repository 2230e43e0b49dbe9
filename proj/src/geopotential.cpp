#include "sgeuler/geopotential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace sgeuler {

GeopotentialState::GeopotentialState(ScalarField p, VectorField grad, TensorField hess, double time, EigenMin lmin,
                                     double lambda0)
    : p_(std::move(p)), grad_(std::move(grad)), hess_(std::move(hess)), time_(time), lambda_min_(lmin),
      lambda0_(lambda0) {}

GeopotentialState GeopotentialState::create(ScalarField p, double time, std::optional<double> lambda0) {
    if (!all_finite(p)) throw std::invalid_argument("potential must be finite");
    const double mean = std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
    for (double& x : p) x -= mean;
    VectorField g = gradient(p);
    TensorField h = hessian(p);
    const EigenMin lmin = min_hessian_eigenvalue(h);
    const double l0 = lambda0.value_or(lmin.value);
    return GeopotentialState(std::move(p), std::move(g), std::move(h), time, lmin, l0);
}

Preset Preset::tilted(const Vec3& a) {
    Preset p;
    p.kind = Kind::Tilt;
    p.tilt = a;
    return p;
}

Preset Preset::quadratic(const Vec3& q) {
    Preset p;
    p.kind = Kind::Quadratic;
    p.quad = q;
    return p;
}

Preset Preset::bump(double delta, int k) {
    Preset p;
    p.kind = Kind::Bump;
    p.bump_delta = delta;
    p.bump_k = k;
    return p;
}

std::string to_string(Preset::Kind k) {
    switch (k) {
        case Preset::Kind::Identity: return "identity";
        case Preset::Kind::Tilt: return "tilt";
        case Preset::Kind::Quadratic: return "quadratic";
        case Preset::Kind::Bump: return "bump";
    }
    return "unknown";
}

ScalarField preset_potential(const Preset& preset, const GridSpec& spec) {
    switch (preset.kind) {
        case Preset::Kind::Identity:
            return sample_scalar(spec, [](const Vec3& x) { return 0.5 * dot(x, x); });
        case Preset::Kind::Tilt:
            return sample_scalar(spec, [a = preset.tilt](const Vec3& x) { return 0.5 * dot(x, x) + dot(a, x); });
        case Preset::Kind::Quadratic:
            return sample_scalar(spec, [q = preset.quad](const Vec3& x) {
                return 0.5 * (q[0] * x[0] * x[0] + q[1] * x[1] * x[1] + q[2] * x[2] * x[2]);
            });
        case Preset::Kind::Bump: {
            const double w = preset.bump_k * std::numbers::pi;
            return sample_scalar(spec, [w, d = preset.bump_delta](const Vec3& x) {
                return 0.5 * dot(x, x) + d * std::sin(w * x[0]) * std::sin(w * x[1]) * std::sin(w * x[2]);
            });
        }
    }
    throw std::invalid_argument("unknown preset");
}

GeopotentialState init_state(const ScalarField& p0) {
    GeopotentialState s = GeopotentialState::create(p0, 0.0);
    if (!(s.lambda_min() > 0.0)) throw NonConvexError(s.lambda_argmin(), s.lambda_min());
    return s;
}

GeopotentialState init_state(const Preset& preset, const GridSpec& spec) {
    return init_state(preset_potential(preset, spec));
}

GeopotentialState apply_potential_update(const GeopotentialState& s, const ScalarField& q, double epsilon) {
    ScalarField next = s.potential();
    for (std::size_t c = 0; c < next.size(); ++c) next[c] -= epsilon * q[c];
    return GeopotentialState::create(std::move(next), s.time() + epsilon, s.lambda0());
}

double c1alpha_surrogate(const TensorField& hess, double alpha) {
    const GridSpec& g = hess.spec();
    double sup = 0.0;
    double quotient = 0.0;
    for (std::size_t c = 0; c < hess.size(); ++c) {
        sup = std::max(sup, spectral_norm(hess[c]));
        const CellIndex ci = g.cell(c);
        const std::array<int, 3> pos{ci.i, ci.j, ci.k};
        for (int a = 0; a < 3; ++a) {
            if (pos[static_cast<std::size_t>(a)] + 1 >= g.dim(a)) continue;
            const Mat3& next = hess[c + g.stride(a)];
            quotient = std::max(quotient, spectral_norm(next - hess[c]) / std::pow(g.h(a), alpha));
        }
    }
    return sup + quotient;
}

double existence_time(double lambda0, double kappa, double grad_norm0, double c_star, double c_m) {
    return std::log1p(lambda0 / (6.0 * c_m * (kappa + grad_norm0))) / (1.0 + 2.0 * c_star);
}

SchemeConstants compute_constants(const GeopotentialState& s0, double p, double c_star, double c_m) {
    if (!(p > 3.0)) throw std::invalid_argument("Lebesgue exponent must exceed 3");
    if (!(c_star > 0.0) || !(c_m > 0.0)) throw std::invalid_argument("c_star and C_M must be positive");
    const GridSpec& g = s0.spec();

    SchemeConstants k;
    k.p = p;
    k.lambda0 = s0.lambda0();
    k.c_star = c_star;
    k.c_m = c_m;
    k.domain_volume = g.domain_volume();
    k.holder_alpha = 1.0 - 3.0 / p;

    const VectorField j_id = sample_vector(g, [](const Vec3& x) { return apply_j(x); });
    k.omega = vector_sobolev_norm(j_id, 3, p);
    k.grad_norm0 = sobolev_norm(s0.potential(), 3, p);
    k.m_star = c1alpha_surrogate(s0.hess(), k.holder_alpha) + k.lambda0 / 6.0;
    k.kappa = (k.omega + 2.0 * c_star * std::pow(k.domain_volume, 1.0 / p)) / (1.0 + 2.0 * c_star);
    k.tau_star = existence_time(k.lambda0, k.kappa, k.grad_norm0, c_star, c_m);
    return k;
}

}  // namespace sgeuler
