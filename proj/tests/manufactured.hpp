#pragma once

// Smooth manufactured div-curl problem on the unit cube: symmetric A with
// diagonal >= 1.2 and off-diagonal entries <= 0.2 in size, a divergence-free
// u* tangential to the boundary, and q* = cos cos cos. Then f = A u* - grad q*
// and the exact solution of curl(Au) = curl f, div u = 0, u.n = 0 is u*.

#include <cmath>
#include <numbers>

#include "sgeuler/divcurl.hpp"

namespace manufactured {

using sgeuler::Mat3;
using sgeuler::Vec3;
using sgeuler::operator*;
using sgeuler::operator-;

inline constexpr double pi = std::numbers::pi;

inline Mat3 coefficient(const Vec3& x) {
    const double a11 = 1.5 + 0.2 * std::sin(pi * x[0]);
    const double a22 = 1.4 + 0.2 * std::cos(pi * x[1]);
    const double a33 = 1.6 + 0.1 * std::sin(pi * (x[0] + x[2]));
    const double a12 = 0.15 * std::cos(pi * x[2]);
    const double a13 = 0.1 * std::sin(pi * x[1]);
    const double a23 = 0.1 * std::cos(pi * x[0]);
    return {{{a11, a12, a13}, {a12, a22, a23}, {a13, a23, a33}}};
}

// u* = (pi sin(pi x) cos(pi y) g(z), -pi cos(pi x) sin(pi y) g(z), 0) with
// g(z) = 1 + cos(pi z)/2: divergence free, normal component zero on the box.
inline Vec3 velocity(const Vec3& x) {
    const double g = 1.0 + 0.5 * std::cos(pi * x[2]);
    return {pi * std::sin(pi * x[0]) * std::cos(pi * x[1]) * g, -pi * std::cos(pi * x[0]) * std::sin(pi * x[1]) * g,
            0.0};
}

inline Vec3 grad_q(const Vec3& x) {
    const double cx = std::cos(pi * x[0]), cy = std::cos(pi * x[1]), cz = std::cos(pi * x[2]);
    const double sx = std::sin(pi * x[0]), sy = std::sin(pi * x[1]), sz = std::sin(pi * x[2]);
    return {-pi * sx * cy * cz, -pi * cx * sy * cz, -pi * cx * cy * sz};
}

inline Vec3 source(const Vec3& x) { return coefficient(x) * velocity(x) - grad_q(x); }

inline sgeuler::DivCurlData problem(const sgeuler::GridSpec& g) {
    return sgeuler::DivCurlData(sgeuler::sample_tensor(g, coefficient, true), sgeuler::sample_vector(g, source));
}

// L2 error of the discrete velocity at refinement n.
inline double velocity_error(int n, double tol = 1e-12) {
    const sgeuler::GridSpec g = sgeuler::GridSpec::cube(n);
    const sgeuler::DarcySolution sol = sgeuler::solve_divcurl(problem(g), {tol, 0});
    sgeuler::VectorField err = sgeuler::sample_vector(g, velocity);
    for (std::size_t c = 0; c < err.size(); ++c) err[c] = err[c] - sol.u[c];
    return sgeuler::lp_norm(err, 2.0);
}

}  // namespace manufactured
