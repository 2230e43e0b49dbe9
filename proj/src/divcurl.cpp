#include "sgeuler/divcurl.hpp"

#include <algorithm>
#include <cmath>

namespace sgeuler {

namespace {

int line_position(const CellIndex& c, int axis) { return axis == 0 ? c.i : (axis == 1 ? c.j : c.k); }

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

VectorField apply_cellwise(const TensorField& m, const VectorField& v) {
    VectorField out(v.spec());
    for (std::size_t c = 0; c < v.size(); ++c) out[c] = m[c] * v[c];
    return out;
}

}  // namespace

TensorField invert_3x3(const TensorField& t) {
    TensorField inv(t.spec(), t.symmetric());
    for (std::size_t c = 0; c < t.size(); ++c) {
        const Mat3& a = t[c];
        const double det = determinant(a);
        const double scale = frobenius(a);
        if (!(std::abs(det) >= 1e-12 * scale * scale * scale) || scale == 0.0) {
            throw SingularCellError(t.spec().cell(c), det);
        }
        Mat3 m = inverse_unchecked(a);
        if (t.symmetric()) {
            // Adjugate cofactors of a symmetric matrix agree only up to
            // rounding; copy the upper triangle so the flag stays truthful.
            m[1][0] = m[0][1];
            m[2][0] = m[0][2];
            m[2][1] = m[1][2];
        }
        inv[c] = m;
    }
    return inv;
}

DivCurlData::DivCurlData(TensorField a, VectorField f) : a_(std::move(a)), f_(std::move(f)), lambda_{} {
    if (!(a_.spec() == f_.spec())) throw std::invalid_argument("coefficient and source live on different grids");
    if (!all_finite(a_) || !all_finite(f_)) throw std::invalid_argument("div-curl data must be finite");
    lambda_ = {std::numeric_limits<double>::infinity(), {}};
    for (std::size_t c = 0; c < a_.size(); ++c) {
        const double lo = symmetric_eigenvalues(symmetric_part(a_[c]))[0];
        if (lo < lambda_.value) lambda_ = {lo, a_.spec().cell(c)};
    }
    if (!(lambda_.value > 0.0)) throw EllipticityError(lambda_.cell, lambda_.value);
}

DarcyProblem reduce_to_darcy(const DivCurlData& d) {
    const GridSpec& g = d.spec();
    const std::size_t n = g.cell_count();
    TensorField m = invert_3x3(d.a());
    const VectorField mf = apply_cellwise(m, d.f());

    std::vector<std::vector<CsrMatrix::Entry>> rows(n);
    for (auto& r : rows) r.reserve(32);
    std::vector<double> rhs(n, 0.0);
    ScalarField source(g, 0.0);
    double boundary_flux = 0.0;

    std::vector<CsrMatrix::Entry> flux;
    for (int a = 0; a < 3; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        const double ha = g.h(a);
        const int na = g.dim(a);
        const std::size_t sa = g.stride(a);
        const double face_area = g.cell_volume() / ha;

        for (std::size_t lo = 0; lo < n; ++lo) {
            const CellIndex cl = g.cell(lo);
            const int pos = line_position(cl, a);

            // Boundary faces: zero flux in the operator, extrapolated M f in
            // the diagnostic source.
            if (pos == 0) {
                const double face = 1.5 * mf[lo][ua] - 0.5 * mf[lo + sa][ua];
                source[lo] += face / ha;
                boundary_flux -= face * face_area;
            }
            if (pos == na - 1) {
                const double face = 1.5 * mf[lo][ua] - 0.5 * mf[lo - sa][ua];
                source[lo] -= face / ha;
                boundary_flux += face * face_area;
                continue;
            }

            const std::size_t up = lo + sa;
            flux.clear();
            const double m_normal = 0.5 * (m[lo][ua][ua] + m[up][ua][ua]);
            flux.push_back({up, m_normal / ha});
            flux.push_back({lo, -m_normal / ha});
            for (int b = 0; b < 3; ++b) {
                if (b == a) continue;
                const auto ub = static_cast<std::size_t>(b);
                const auto sb = static_cast<std::ptrdiff_t>(g.stride(b));
                for (const std::size_t side : {lo, up}) {
                    const double w = 0.5 * m[side][ua][ub];
                    if (w == 0.0) continue;
                    const Stencil1D st = first_derivative_stencil(line_position(g.cell(side), b), g.dim(b), g.h(b));
                    for (int t = 0; t < st.count; ++t) {
                        const auto col = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(side) +
                                                                  st.offset[static_cast<std::size_t>(t)] * sb);
                        flux.push_back({col, w * st.weight[static_cast<std::size_t>(t)]});
                    }
                }
            }
            // -div: the face flux leaves `lo` and enters `up`.
            for (const auto& e : flux) {
                rows[lo].push_back({e.col, -e.value / ha});
                rows[up].push_back({e.col, e.value / ha});
            }
            const double f_flux = 0.5 * (mf[lo][ua] + mf[up][ua]);
            rhs[lo] += f_flux / ha;
            rhs[up] -= f_flux / ha;
            source[lo] -= f_flux / ha;
            source[up] += f_flux / ha;
        }
    }

    return DarcyProblem(std::move(m), d.f(), CsrMatrix::from_rows(n, rows), std::move(rhs), std::move(source),
                        boundary_flux);
}

DarcySolution solve_darcy(const DarcyProblem& p, const SolverOptions& opts) {
    const GridSpec& g = p.m.spec();
    const std::size_t n = g.cell_count();
    const int budget = opts.maxiter > 0 ? opts.maxiter : static_cast<int>(10 * n);
    const KrylovMethod method =
        p.op.is_symmetric() ? KrylovMethod::ConjugateGradient : KrylovMethod::BiCGStab;

    std::vector<double> b = p.rhs;
    subtract_mean(b);
    const double bnorm = norm2(b);

    DarcySolution sol{ScalarField(g, 0.0), VectorField(g), method, 0, 0.0, {}, 0.0, {}};
    std::vector<double> x(n, 0.0);
    std::vector<double> r = b;
    std::vector<double> lx;

    // Krylov solve plus a few rounds of residual correction, so the reported
    // residual is the true one rather than the recursively updated one.
    double rel = bnorm == 0.0 ? 0.0 : 1.0;
    sol.residual_history.push_back(rel);
    for (int round = 0; round < 4 && rel > opts.tol; ++round) {
        const int remaining = budget - sol.iterations;
        if (remaining <= 0) break;
        const double inner_tol = std::min(0.5, opts.tol / rel);
        KrylovResult kr = method == KrylovMethod::ConjugateGradient ? conjugate_gradient(p.op, r, inner_tol, remaining)
                                                                    : bicgstab(p.op, r, inner_tol, remaining);
        for (std::size_t i = 0; i < n; ++i) x[i] += kr.x[i];
        for (std::size_t h = 1; h < kr.residual_history.size(); ++h) {
            sol.residual_history.push_back(kr.residual_history[h] * rel);
        }
        sol.iterations += kr.iterations;

        p.op.multiply(x, lx);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - lx[i];
        subtract_mean(r);
        rel = norm2(r) / bnorm;
        if (!kr.converged && rel > opts.tol) break;
    }
    if (rel > opts.tol) {
        throw SolverFailure(to_string(method) + " did not reach relative residual " + std::to_string(opts.tol) +
                                " after " + std::to_string(sol.iterations) + " iterations (residual " +
                                std::to_string(rel) + ")",
                            sol.residual_history);
    }

    subtract_mean(x);
    sol.q = ScalarField(g, std::move(x));
    sol.residual = rel;

    p.op.multiply(sol.q.values(), lx);
    for (std::size_t i = 0; i < n; ++i) sol.flux_divergence = std::max(sol.flux_divergence, std::abs(p.rhs[i] - lx[i]));

    const VectorField gq = gradient(sol.q);
    for (std::size_t c = 0; c < n; ++c) sol.u[c] = p.m[c] * (p.f[c] + gq[c]);
    return sol;
}

VectorField recover_velocity(const DivCurlData& d, const ScalarField& q) {
    const TensorField m = invert_3x3(d.a());
    const VectorField gq = gradient(q);
    VectorField u(q.spec());
    for (std::size_t c = 0; c < u.size(); ++c) u[c] = m[c] * (d.f()[c] + gq[c]);
    return u;
}

EstimateRatios verify_estimate(const VectorField& u, const DivCurlData& d, double p) {
    const double source_norm = lp_norm(curl(d.f()), p);
    EstimateRatios r;
    // Below this the source is rounding noise of a curl-free f.
    if (!(source_norm > 1e-11)) return r;
    r.applicable = true;
    r.u_ratio = vector_sobolev_norm(u, 1, p) / source_norm;
    r.au_ratio = vector_sobolev_norm(apply_cellwise(d.a(), u), 1, p) / source_norm;
    return r;
}

DarcySolution solve_divcurl(const DivCurlData& d, const SolverOptions& opts, double p) {
    const DarcyProblem problem = reduce_to_darcy(d);
    DarcySolution sol = solve_darcy(problem, opts);
    sol.estimates = verify_estimate(sol.u, d, p);
    return sol;
}

}  // namespace sgeuler
