#pragma once

#include <array>
#include <memory>
#include <vector>

#include "sgeuler/divcurl.hpp"
#include "sgeuler/geopotential.hpp"

namespace sgeuler {

using Trajectory = std::vector<std::shared_ptr<const GeopotentialState>>;

/// Midpoint rule for 1/2 int ((x1-T1)^2 + (x2-T2)^2 - 2 x3 T3) dx with
/// T = grad P. Not normalised by the volume.
double energy(const GeopotentialState& s);

struct Box {
    Vec3 lo;
    Vec3 hi;
};

/// Componentwise min/max of grad P over the cells.
Box support_box(const GeopotentialState& s);

/// grad P pushed forward from the normalised cell measure. Bin edges span
/// the exact bounding box of the grad P samples; masses are indexed
/// bx + bins * (by + bins * bz).
struct PushforwardHistogram {
    int bins = 0;
    std::array<std::vector<double>, 3> edges;
    std::vector<double> mass;

    double total_mass() const;
    Box box() const { return {{edges[0].front(), edges[1].front(), edges[2].front()},
                              {edges[0].back(), edges[1].back(), edges[2].back()}}; }
};

PushforwardHistogram pushforward_histogram(const GeopotentialState& s, int bins);

/// Per-step comparison of a measured quantity with an envelope.
struct BoundCheck {
    double value = 0.0;
    double bound = 0.0;
    bool ok = true;
    double margin() const { return bound - value; }
};

/// |grad P(t)|_inf <= (|grad P0|_inf + m) e^t - m with m = max |y| over the
/// closed domain, for every state of the trajectory.
std::vector<BoundCheck> support_bound_check(const Trajectory& trajectory);

/// Max of |curl(grad P)| over cells at least two layers from every face.
double curl_residual(const GeopotentialState& s);

struct DiagnosticsRecord {
    int step = 0;
    double time = 0.0;
    double energy = 0.0;
    double l2_grad = 0.0;
    double lp_grad = 0.0;
    double linf_grad = 0.0;
    double w3p_grad = 0.0;
    double lambda_min = 0.0;
    CellIndex lambda_argmin;
    double curl_residual = 0.0;
    Box bbox{};
    double u_max = 0.0;
    int solver_iterations = 0;
    double solver_residual = 0.0;
    EstimateRatios estimates;

    bool operator==(const DiagnosticsRecord& o) const;
};

/// Pure function of its inputs. `solution` may be null (no velocity known),
/// in which case the velocity and solver fields are zero.
DiagnosticsRecord emit_record(int step, const GeopotentialState& s, const DarcySolution* solution,
                              const SchemeConstants& constants);

}  // namespace sgeuler
