#include "sgeuler/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sgeuler {

double energy(const GeopotentialState& s) {
    const GridSpec& g = s.spec();
    double acc = 0.0;
    for (std::size_t c = 0; c < s.grad().size(); ++c) {
        const Vec3 x = g.center(g.cell(c));
        const Vec3& t = s.grad()[c];
        acc += (x[0] - t[0]) * (x[0] - t[0]) + (x[1] - t[1]) * (x[1] - t[1]) - 2.0 * x[2] * t[2];
    }
    return 0.5 * acc * g.cell_volume();
}

Box support_box(const GeopotentialState& s) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    Box b{{inf, inf, inf}, {-inf, -inf, -inf}};
    for (const Vec3& t : s.grad()) {
        for (std::size_t a = 0; a < 3; ++a) {
            b.lo[a] = std::min(b.lo[a], t[a]);
            b.hi[a] = std::max(b.hi[a], t[a]);
        }
    }
    return b;
}

double PushforwardHistogram::total_mass() const {
    double m = 0.0;
    for (double x : mass) m += x;
    return m;
}

PushforwardHistogram pushforward_histogram(const GeopotentialState& s, int bins) {
    if (bins < 1) throw std::invalid_argument("histogram needs at least one bin per axis");
    const Box box = support_box(s);
    PushforwardHistogram h;
    h.bins = bins;
    for (std::size_t a = 0; a < 3; ++a) {
        h.edges[a].resize(static_cast<std::size_t>(bins) + 1);
        for (int e = 0; e <= bins; ++e) {
            h.edges[a][static_cast<std::size_t>(e)] = box.lo[a] + (box.hi[a] - box.lo[a]) * e / bins;
        }
        // The end points are the exact extremes, not a rounded sum.
        h.edges[a].front() = box.lo[a];
        h.edges[a].back() = box.hi[a];
    }
    const auto nb = static_cast<std::size_t>(bins);
    h.mass.assign(nb * nb * nb, 0.0);
    const double weight = 1.0 / static_cast<double>(s.grad().size());
    for (const Vec3& t : s.grad()) {
        std::array<std::size_t, 3> b{};
        for (std::size_t a = 0; a < 3; ++a) {
            const double width = box.hi[a] - box.lo[a];
            if (width > 0.0) {
                const auto raw = static_cast<long>(std::floor((t[a] - box.lo[a]) / width * bins));
                b[a] = static_cast<std::size_t>(std::clamp(raw, 0L, static_cast<long>(bins) - 1));
            }
        }
        h.mass[b[0] + nb * (b[1] + nb * b[2])] += weight;
    }
    return h;
}

std::vector<BoundCheck> support_bound_check(const Trajectory& trajectory) {
    std::vector<BoundCheck> out;
    if (trajectory.empty()) return out;
    const double m = trajectory.front()->spec().max_point_norm();
    const double start = lp_norm(trajectory.front()->grad(), kInfinity);
    const double t0 = trajectory.front()->time();
    for (const auto& s : trajectory) {
        BoundCheck b;
        b.value = lp_norm(s->grad(), kInfinity);
        b.bound = (start + m) * std::exp(s->time() - t0) - m;
        b.ok = b.value <= b.bound * (1.0 + 1e-12);
        out.push_back(b);
    }
    return out;
}

double curl_residual(const GeopotentialState& s) {
    const VectorField c = curl(s.grad());
    const GridSpec& g = s.spec();
    double worst = 0.0;
    for (std::size_t idx = 0; idx < c.size(); ++idx) {
        const CellIndex ci = g.cell(idx);
        const bool interior = ci.i >= 2 && ci.i < g.dim(0) - 2 && ci.j >= 2 && ci.j < g.dim(1) - 2 && ci.k >= 2 &&
                              ci.k < g.dim(2) - 2;
        if (interior) worst = std::max(worst, norm(c[idx]));
    }
    return worst;
}

bool DiagnosticsRecord::operator==(const DiagnosticsRecord& o) const {
    return step == o.step && time == o.time && energy == o.energy && l2_grad == o.l2_grad && lp_grad == o.lp_grad &&
           linf_grad == o.linf_grad && w3p_grad == o.w3p_grad && lambda_min == o.lambda_min &&
           lambda_argmin == o.lambda_argmin && curl_residual == o.curl_residual && bbox.lo == o.bbox.lo &&
           bbox.hi == o.bbox.hi && u_max == o.u_max && solver_iterations == o.solver_iterations &&
           solver_residual == o.solver_residual && estimates.applicable == o.estimates.applicable &&
           estimates.u_ratio == o.estimates.u_ratio && estimates.au_ratio == o.estimates.au_ratio;
}

DiagnosticsRecord emit_record(int step, const GeopotentialState& s, const DarcySolution* solution,
                              const SchemeConstants& constants) {
    DiagnosticsRecord r;
    r.step = step;
    r.time = s.time();
    r.energy = energy(s);
    r.l2_grad = lp_norm(s.grad(), 2.0);
    r.lp_grad = lp_norm(s.grad(), constants.p);
    r.linf_grad = lp_norm(s.grad(), kInfinity);
    r.w3p_grad = sobolev_norm(s.potential(), 3, constants.p);
    r.lambda_min = s.lambda_min();
    r.lambda_argmin = s.lambda_argmin();
    r.curl_residual = curl_residual(s);
    r.bbox = support_box(s);
    if (solution != nullptr) {
        r.u_max = lp_norm(solution->u, kInfinity);
        r.solver_iterations = solution->iterations;
        r.solver_residual = solution->residual;
        r.estimates = solution->estimates;
    }
    return r;
}

}  // namespace sgeuler
