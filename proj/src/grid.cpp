#include "sgeuler/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>

namespace sgeuler {

// ---------------------------------------------------------------------------
// small matrices

Mat3 inverse_unchecked(const Mat3& a) {
    const double det = determinant(a);
    Mat3 inv{};
    inv[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
    inv[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
    inv[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
    inv[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
    inv[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
    inv[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
    inv[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
    inv[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
    inv[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
    return inv;
}

Vec3 symmetric_eigenvalues(const Mat3& input) {
    Mat3 a = input;
    const double scale = frobenius(a);
    if (scale == 0.0) return {0.0, 0.0, 0.0};

    for (int sweep = 0; sweep < 64; ++sweep) {
        const double off = std::sqrt(a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]);
        if (off <= 1e-17 * scale) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // A <- G^T A G with the rotation in the (p, q) plane.
                for (int r = 0; r < 3; ++r) {
                    const double arp = a[r][p];
                    const double arq = a[r][q];
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for (int r = 0; r < 3; ++r) {
                    const double apr = a[p][r];
                    const double aqr = a[q][r];
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
            }
        }
    }
    Vec3 ev{a[0][0], a[1][1], a[2][2]};
    std::sort(ev.begin(), ev.end());
    return ev;
}

double spectral_norm(const Mat3& a) {
    const Vec3 ev = symmetric_eigenvalues(transpose(a) * a);
    return std::sqrt(std::max(ev[2], 0.0));
}

// ---------------------------------------------------------------------------
// GridSpec

std::string to_string(const CellIndex& c) {
    std::ostringstream os;
    os << "(" << c.i << ", " << c.j << ", " << c.k << ")";
    return os.str();
}

GridSpec::GridSpec(std::array<int, 3> dims, Vec3 origin, Vec3 extents)
    : dims_(dims), origin_(origin), extents_(extents), spacing_{} {
    for (std::size_t a = 0; a < 3; ++a) {
        if (dims_[a] < 4) {
            throw std::invalid_argument("grid needs at least 4 cells per axis, got " + std::to_string(dims_[a]));
        }
        if (!(extents_[a] > 0.0) || !std::isfinite(extents_[a])) {
            throw std::invalid_argument("grid extents must be positive and finite");
        }
        if (!std::isfinite(origin_[a])) throw std::invalid_argument("grid origin must be finite");
        spacing_[a] = extents_[a] / dims_[a];
    }
}

GridSpec GridSpec::cube(int n, double extent) { return GridSpec({n, n, n}, {0.0, 0.0, 0.0}, {extent, extent, extent}); }

std::size_t GridSpec::cell_count() const {
    return static_cast<std::size_t>(dims_[0]) * static_cast<std::size_t>(dims_[1]) * static_cast<std::size_t>(dims_[2]);
}

double GridSpec::max_point_norm() const {
    double best = 0.0;
    for (int corner = 0; corner < 8; ++corner) {
        Vec3 y{};
        for (std::size_t a = 0; a < 3; ++a) {
            y[a] = origin_[a] + (((corner >> a) & 1) ? extents_[a] : 0.0);
        }
        best = std::max(best, norm(y));
    }
    return best;
}

CellIndex GridSpec::cell(std::size_t idx) const {
    const auto nx = static_cast<std::size_t>(dims_[0]);
    const auto ny = static_cast<std::size_t>(dims_[1]);
    return {static_cast<int>(idx % nx), static_cast<int>((idx / nx) % ny), static_cast<int>(idx / (nx * ny))};
}

std::size_t GridSpec::stride(int axis) const {
    if (axis == 0) return 1;
    if (axis == 1) return static_cast<std::size_t>(dims_[0]);
    return static_cast<std::size_t>(dims_[0]) * static_cast<std::size_t>(dims_[1]);
}

Vec3 GridSpec::center(int i, int j, int k) const {
    return {origin_[0] + (i + 0.5) * spacing_[0], origin_[1] + (j + 0.5) * spacing_[1],
            origin_[2] + (k + 0.5) * spacing_[2]};
}

bool TensorField::exactly_symmetric() const {
    for (const Mat3& m : values()) {
        if (m[0][1] != m[1][0] || m[0][2] != m[2][0] || m[1][2] != m[2][1]) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// sampling

ScalarField sample_scalar(const GridSpec& spec, const std::function<double(const Vec3&)>& fn) {
    ScalarField s(spec);
    for (std::size_t c = 0; c < s.size(); ++c) s[c] = fn(spec.center(spec.cell(c)));
    return s;
}

VectorField sample_vector(const GridSpec& spec, const std::function<Vec3(const Vec3&)>& fn) {
    VectorField v(spec);
    for (std::size_t c = 0; c < v.size(); ++c) v[c] = fn(spec.center(spec.cell(c)));
    return v;
}

TensorField sample_tensor(const GridSpec& spec, const std::function<Mat3(const Vec3&)>& fn, bool symmetric) {
    TensorField t(spec, symmetric);
    for (std::size_t c = 0; c < t.size(); ++c) t[c] = fn(spec.center(spec.cell(c)));
    return t;
}

VectorField coordinates(const GridSpec& spec) {
    return sample_vector(spec, [](const Vec3& x) { return x; });
}

ScalarField component(const VectorField& v, int axis) {
    ScalarField s(v.spec());
    for (std::size_t c = 0; c < v.size(); ++c) s[c] = v[c][static_cast<std::size_t>(axis)];
    return s;
}

bool all_finite(const ScalarField& s) {
    return std::all_of(s.begin(), s.end(), [](double x) { return std::isfinite(x); });
}

bool all_finite(const VectorField& v) {
    return std::all_of(v.begin(), v.end(), [](const Vec3& x) {
        return std::isfinite(x[0]) && std::isfinite(x[1]) && std::isfinite(x[2]);
    });
}

bool all_finite(const TensorField& t) {
    return std::all_of(t.begin(), t.end(), [](const Mat3& m) { return std::isfinite(frobenius(m)); });
}

// ---------------------------------------------------------------------------
// stencils

Stencil1D first_derivative_stencil(int i, int n, double h) {
    Stencil1D s;
    s.count = 3;
    if (i == 0) {
        s.offset = {0, 1, 2, 0};
        s.weight = {-1.5 / h, 2.0 / h, -0.5 / h, 0.0};
    } else if (i == n - 1) {
        s.offset = {-2, -1, 0, 0};
        s.weight = {0.5 / h, -2.0 / h, 1.5 / h, 0.0};
    } else {
        s.count = 2;
        s.offset = {-1, 1, 0, 0};
        s.weight = {-0.5 / h, 0.5 / h, 0.0, 0.0};
    }
    return s;
}

Stencil1D second_derivative_stencil(int i, int n, double h) {
    const double h2 = h * h;
    Stencil1D s;
    if (i == 0) {
        s.count = 4;
        s.offset = {0, 1, 2, 3};
        s.weight = {2.0 / h2, -5.0 / h2, 4.0 / h2, -1.0 / h2};
    } else if (i == n - 1) {
        s.count = 4;
        s.offset = {-3, -2, -1, 0};
        s.weight = {-1.0 / h2, 4.0 / h2, -5.0 / h2, 2.0 / h2};
    } else {
        s.count = 3;
        s.offset = {-1, 0, 1, 0};
        s.weight = {1.0 / h2, -2.0 / h2, 1.0 / h2, 0.0};
    }
    return s;
}

Stencil1D shifted_centered_stencil(int order, int i, int n, double h) {
    Stencil1D s;
    switch (order) {
        case 0:
            s.count = 1;
            s.offset = {0, 0, 0, 0};
            s.weight = {1.0, 0.0, 0.0, 0.0};
            return s;
        case 1: {
            const int c = std::clamp(i, 1, n - 2) - i;
            s.count = 2;
            s.offset = {c - 1, c + 1, 0, 0};
            s.weight = {-0.5 / h, 0.5 / h, 0.0, 0.0};
            return s;
        }
        case 2: {
            const int c = std::clamp(i, 1, n - 2) - i;
            const double h2 = h * h;
            s.count = 3;
            s.offset = {c - 1, c, c + 1, 0};
            s.weight = {1.0 / h2, -2.0 / h2, 1.0 / h2, 0.0};
            return s;
        }
        case 3: {
            if (n < 5) throw std::invalid_argument("third derivatives need at least 5 cells per axis");
            const int c = std::clamp(i, 2, n - 3) - i;
            const double h3 = h * h * h;
            s.count = 4;
            s.offset = {c - 2, c - 1, c + 1, c + 2};
            s.weight = {-0.5 / h3, 1.0 / h3, -1.0 / h3, 0.5 / h3};
            return s;
        }
        default:
            throw std::invalid_argument("derivative order must be 0..3");
    }
}

namespace {

int line_position(const CellIndex& c, int axis) { return axis == 0 ? c.i : (axis == 1 ? c.j : c.k); }

template <typename StencilFn>
ScalarField apply_along(const ScalarField& s, int axis, StencilFn stencil_at) {
    const GridSpec& g = s.spec();
    const int n = g.dim(axis);
    const double h = g.h(axis);
    const auto stride = static_cast<std::ptrdiff_t>(g.stride(axis));
    ScalarField out(g);
    for (std::size_t c = 0; c < s.size(); ++c) {
        const Stencil1D st = stencil_at(line_position(g.cell(c), axis), n, h);
        // Weights sum to zero, so differences against the centre value give
        // the same stencil and an exact zero on constants.
        double acc = 0.0;
        for (int t = 0; t < st.count; ++t) {
            const auto at = static_cast<std::ptrdiff_t>(c) + st.offset[static_cast<std::size_t>(t)] * stride;
            acc += st.weight[static_cast<std::size_t>(t)] * (s[static_cast<std::size_t>(at)] - s[c]);
        }
        out[c] = acc;
    }
    return out;
}

// Tensor-product derivative d^{o0+o1+o2} / dx^o0 dy^o1 dz^o2 with shifted
// centred stencils, evaluated at cell c.
double shifted_mixed_derivative(const ScalarField& s, const std::array<int, 3>& orders, std::size_t c) {
    const GridSpec& g = s.spec();
    const CellIndex ci = g.cell(c);
    const Stencil1D sx = shifted_centered_stencil(orders[0], ci.i, g.dim(0), g.h(0));
    const Stencil1D sy = shifted_centered_stencil(orders[1], ci.j, g.dim(1), g.h(1));
    const Stencil1D sz = shifted_centered_stencil(orders[2], ci.k, g.dim(2), g.h(2));
    double acc = 0.0;
    for (int a = 0; a < sx.count; ++a) {
        for (int b = 0; b < sy.count; ++b) {
            for (int d = 0; d < sz.count; ++d) {
                const double w = sx.weight[static_cast<std::size_t>(a)] * sy.weight[static_cast<std::size_t>(b)] *
                                 sz.weight[static_cast<std::size_t>(d)];
                acc += w * s.at(ci.i + sx.offset[static_cast<std::size_t>(a)], ci.j + sy.offset[static_cast<std::size_t>(b)],
                                ci.k + sz.offset[static_cast<std::size_t>(d)]);
            }
        }
    }
    return acc;
}

template <typename T, typename MagnitudeFn>
double weighted_lp(const Field<T>& f, double p, MagnitudeFn magnitude) {
    if (!(p >= 1.0)) throw std::invalid_argument("L^p norm needs p >= 1");
    double mx = 0.0;
    for (const T& x : f) mx = std::max(mx, magnitude(x));
    if (std::isinf(p) || mx == 0.0) return mx;
    double acc = 0.0;
    for (const T& x : f) acc += std::pow(magnitude(x) / mx, p);
    return mx * std::pow(acc * f.spec().cell_volume(), 1.0 / p);
}

double lp_of_magnitudes(const ScalarField& mags, double p) {
    return weighted_lp(mags, p, [](double x) { return std::abs(x); });
}

}  // namespace

ScalarField partial(const ScalarField& s, int axis) { return apply_along(s, axis, first_derivative_stencil); }

ScalarField second_partial(const ScalarField& s, int axis) { return apply_along(s, axis, second_derivative_stencil); }

VectorField gradient(const ScalarField& s) {
    const ScalarField dx = partial(s, 0);
    const ScalarField dy = partial(s, 1);
    const ScalarField dz = partial(s, 2);
    VectorField g(s.spec());
    for (std::size_t c = 0; c < s.size(); ++c) g[c] = {dx[c], dy[c], dz[c]};
    return g;
}

TensorField hessian(const ScalarField& s) {
    TensorField hs(s.spec(), true);
    std::array<ScalarField, 3> first{partial(s, 0), partial(s, 1), partial(s, 2)};
    for (int a = 0; a < 3; ++a) {
        const ScalarField daa = second_partial(s, a);
        for (std::size_t c = 0; c < s.size(); ++c) hs[c][static_cast<std::size_t>(a)][static_cast<std::size_t>(a)] = daa[c];
        for (int b = a + 1; b < 3; ++b) {
            const ScalarField dab = partial(first[static_cast<std::size_t>(b)], a);
            for (std::size_t c = 0; c < s.size(); ++c) {
                hs[c][static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = dab[c];
                hs[c][static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = dab[c];
            }
        }
    }
    return hs;
}

ScalarField divergence(const VectorField& v) {
    ScalarField out(v.spec(), 0.0);
    for (int a = 0; a < 3; ++a) {
        const ScalarField d = partial(component(v, a), a);
        for (std::size_t c = 0; c < v.size(); ++c) out[c] += d[c];
    }
    return out;
}

VectorField curl(const VectorField& v) {
    const TensorField jac = jacobian(v);
    VectorField out(v.spec());
    for (std::size_t c = 0; c < v.size(); ++c) {
        const Mat3& d = jac[c];
        out[c] = {d[2][1] - d[1][2], d[0][2] - d[2][0], d[1][0] - d[0][1]};
    }
    return out;
}

TensorField jacobian(const VectorField& v) {
    TensorField jac(v.spec(), false);
    for (int a = 0; a < 3; ++a) {
        const ScalarField va = component(v, a);
        for (int b = 0; b < 3; ++b) {
            const ScalarField d = partial(va, b);
            for (std::size_t c = 0; c < v.size(); ++c) jac[c][static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = d[c];
        }
    }
    return jac;
}

double lp_norm(const ScalarField& s, double p) { return lp_of_magnitudes(s, p); }

double lp_norm(const VectorField& v, double p) {
    return weighted_lp(v, p, [](const Vec3& x) { return norm(x); });
}

double lp_norm(const TensorField& t, double p) {
    return weighted_lp(t, p, [](const Mat3& m) { return frobenius(m); });
}

ScalarField third_derivative_magnitude(const ScalarField& s) {
    // Each multi-index with |alpha| = 3, weighted by the number of ordered
    // index triples it stands for.
    struct Term {
        std::array<int, 3> orders;
        double multiplicity;
    };
    static const std::array<Term, 10> terms{{{{3, 0, 0}, 1.0},
                                             {{0, 3, 0}, 1.0},
                                             {{0, 0, 3}, 1.0},
                                             {{2, 1, 0}, 3.0},
                                             {{2, 0, 1}, 3.0},
                                             {{1, 2, 0}, 3.0},
                                             {{0, 2, 1}, 3.0},
                                             {{1, 0, 2}, 3.0},
                                             {{0, 1, 2}, 3.0},
                                             {{1, 1, 1}, 6.0}}};
    ScalarField out(s.spec(), 0.0);
    for (std::size_t c = 0; c < s.size(); ++c) {
        double acc = 0.0;
        for (const Term& t : terms) {
            const double d = shifted_mixed_derivative(s, t.orders, c);
            acc += t.multiplicity * d * d;
        }
        out[c] = std::sqrt(acc);
    }
    return out;
}

double sobolev_norm(const ScalarField& s, int m, double p) {
    if (m < 1 || m > 3) throw std::invalid_argument("sobolev_norm supports derivative orders 1..3");
    double total = lp_norm(gradient(s), p);
    if (m >= 2) total += lp_norm(hessian(s), p);
    if (m >= 3) total += lp_of_magnitudes(third_derivative_magnitude(s), p);
    return total;
}

double vector_sobolev_norm(const VectorField& v, int m, double p) {
    if (m < 0 || m > 3) throw std::invalid_argument("vector_sobolev_norm supports orders 0..3");
    double total = lp_norm(v, p);
    if (m >= 1) total += lp_norm(jacobian(v), p);
    if (m >= 2) {
        ScalarField mag(v.spec(), 0.0);
        for (int a = 0; a < 3; ++a) {
            const TensorField h = hessian(component(v, a));
            for (std::size_t c = 0; c < v.size(); ++c) mag[c] += frobenius(h[c]) * frobenius(h[c]);
        }
        for (double& x : mag) x = std::sqrt(x);
        total += lp_of_magnitudes(mag, p);
    }
    if (m >= 3) {
        ScalarField mag(v.spec(), 0.0);
        for (int a = 0; a < 3; ++a) {
            const ScalarField t = third_derivative_magnitude(component(v, a));
            for (std::size_t c = 0; c < v.size(); ++c) mag[c] += t[c] * t[c];
        }
        for (double& x : mag) x = std::sqrt(x);
        total += lp_of_magnitudes(mag, p);
    }
    return total;
}

EigenMin min_hessian_eigenvalue(const TensorField& t) {
    if (!t.symmetric()) throw std::invalid_argument("min_hessian_eigenvalue needs a symmetric tensor field");
    EigenMin best{std::numeric_limits<double>::infinity(), {}};
    for (std::size_t c = 0; c < t.size(); ++c) {
        const double lo = symmetric_eigenvalues(t[c])[0];
        if (lo < best.value) best = {lo, t.spec().cell(c)};
    }
    return best;
}

}  // namespace sgeuler
