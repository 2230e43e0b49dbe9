#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sgeuler/stepper.hpp"
#include "support.hpp"

using namespace sgeuler;

namespace {

// Tilt vector of a state: grad P - x, averaged over cells (exact for tilts).
Vec3 tilt_of(const GeopotentialState& s) {
    Vec3 acc{0, 0, 0};
    const GridSpec& g = s.spec();
    for (std::size_t c = 0; c < s.grad().size(); ++c) acc = acc + (s.grad()[c] - g.center(g.cell(c)));
    return (1.0 / static_cast<double>(s.grad().size())) * acc;
}

double tilt_spread(const GeopotentialState& s, const Vec3& a) {
    const GridSpec& g = s.spec();
    double worst = 0.0;
    for (std::size_t c = 0; c < s.grad().size(); ++c) {
        worst = std::max(worst, norm(s.grad()[c] - g.center(g.cell(c)) - a));
    }
    return worst;
}

Vec3 euler_tilt(Vec3 a, double eps, int n) {
    for (int j = 0; j < n; ++j) a = a + eps * apply_j(a);
    return a;
}

}  // namespace

TEST(Init, PresetConvexityModuli) {
    const GridSpec g = GridSpec::cube(8);
    EXPECT_NEAR(init_state(Preset::identity(), g).lambda0(), 1.0, 1e-12);
    EXPECT_NEAR(init_state(Preset::quadratic({2.0, 1.0, 0.5}), g).lambda0(), 0.5, 1e-12);
}

TEST(Init, BumpModulusMatchesIndependentScan) {
    const GridSpec g = GridSpec::cube(16);
    const GeopotentialState s = init_state(Preset::bump(0.01, 1), g);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    EXPECT_GE(s.lambda0(), 1.0 - 0.01 * 3.0 * pi2);
    EXPECT_LE(s.lambda0(), 1.0);
    const oracle::Grid og = support::to_oracle(g);
    const Eigen::VectorXd p = support::to_eigen(s.potential());
    double best = 1e300;
    for (int c = 0; c < og.cells(); ++c) {
        best = std::min(best, Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(oracle::hess(og, p, c)).eigenvalues()(0));
    }
    EXPECT_NEAR(s.lambda0(), best, 1e-10);
}

TEST(Init, NonConvexInputIsRejectedWithCell) {
    const GridSpec g = GridSpec::cube(6);
    const ScalarField p = sample_scalar(g, [](const Vec3& x) { return 0.5 * x[0] * x[0] - 0.5 * x[1] * x[1]; });
    try {
        init_state(p);
        FAIL() << "expected NonConvexError";
    } catch (const NonConvexError& e) {
        EXPECT_NEAR(e.eigenvalue(), -1.0, 1e-9);
    }
}

TEST(State, MeanZeroAndCachesMatchOperators) {
    const GridSpec g = GridSpec::cube(6);
    const ScalarField p = preset_potential(Preset::tilted({0.3, 0.1, -0.2}), g);
    const GeopotentialState s = GeopotentialState::create(p, 0.5);
    double mean = 0.0, scale = 0.0;
    for (double x : s.potential()) {
        mean += x;
        scale = std::max(scale, std::abs(x));
    }
    EXPECT_LT(std::abs(mean / static_cast<double>(s.potential().size())), 1e-12 * scale);
    EXPECT_EQ(s.grad().values(), gradient(s.potential()).values());
    EXPECT_EQ(s.hess().values(), hessian(s.potential()).values());
    EXPECT_EQ(s.lambda_min(), min_hessian_eigenvalue(s.hess()).value);
    EXPECT_EQ(s.time(), 0.5);
}

TEST(Constants, DirectSubstitution) {
    const GridSpec g = GridSpec::cube(8);
    const GeopotentialState s = init_state(Preset::identity(), g);
    const SchemeConstants k = compute_constants(s, 4.0, 1.0, 1.0);
    const double omega = vector_sobolev_norm(sample_vector(g, [](const Vec3& x) { return apply_j(x); }), 3, 4.0);
    EXPECT_DOUBLE_EQ(k.omega, omega);
    EXPECT_NEAR(k.kappa, (omega + 2.0) / 3.0, 1e-14);
    const double n0 = sobolev_norm(s.potential(), 3, 4.0);
    EXPECT_NEAR(k.tau_star, std::log(1.0 + k.lambda0 / (6.0 * (k.kappa + n0))) / 3.0, 1e-15);
    EXPECT_GT(k.tau_star, 0.0);
    EXPECT_GT(k.kappa, 0.0);
    EXPECT_DOUBLE_EQ(k.holder_alpha, 0.25);
    // Identity: D^2P = I exactly, Holder quotient zero.
    EXPECT_NEAR(k.m_star, 1.0 + 1.0 / 6.0, 1e-9);
}

TEST(Constants, MonotoneInCStarAndLambda) {
    const GeopotentialState s = init_state(Preset::bump(0.005, 1), GridSpec::cube(8));
    const SchemeConstants k1 = compute_constants(s, 4.0, 1.0, 1.0);
    const SchemeConstants k2 = compute_constants(s, 4.0, 2.0, 1.0);
    EXPECT_LT(k2.tau_star, k1.tau_star);
    double prev = existence_time(1.0, k1.kappa, k1.grad_norm0, 1.0, 1.0);
    for (double l : {0.5, 0.1, 1e-3, 1e-6}) {
        const double t = existence_time(l, k1.kappa, k1.grad_norm0, 1.0, 1.0);
        EXPECT_LT(t, prev);
        prev = t;
    }
    EXPECT_LT(prev, 1e-6);
}

TEST(Constants, PreconditionsEnforced) {
    const GeopotentialState s = init_state(Preset::identity(), GridSpec::cube(6));
    EXPECT_THROW(compute_constants(s, 3.0), std::invalid_argument);
    EXPECT_THROW(compute_constants(s, 4.0, 0.0), std::invalid_argument);
    EXPECT_THROW(compute_constants(s, 4.0, 1.0, -1.0), std::invalid_argument);
    EXPECT_THROW(compute_constants(init_state(Preset::identity(), GridSpec::cube(4))), std::invalid_argument);
}

TEST(Step, IdentityIsFixedPoint) {
    const GeopotentialState s = init_state(Preset::identity(), GridSpec::cube(8));
    const StepResult r = step(s, 0.01);
    double worst = 0.0;
    for (std::size_t c = 0; c < s.potential().size(); ++c) {
        worst = std::max(worst, std::abs(r.next.potential()[c] - s.potential()[c]));
    }
    EXPECT_LE(worst, 1e-9);
    EXPECT_DOUBLE_EQ(r.next.time(), 0.01);
}

TEST(Step, TiltRotatesByForwardEuler) {
    const Vec3 a{0.1, 0.0, 0.05};
    const GeopotentialState s = init_state(Preset::tilted(a), GridSpec::cube(8));
    const StepResult r = step(s, 0.1);
    const Vec3 expected = euler_tilt(a, 0.1, 1);
    EXPECT_LT(tilt_spread(r.next, expected), 1e-9);
    EXPECT_LT(lp_norm(r.solution.u, kInfinity), 1e-9);
}

TEST(Step, PotentialUpdateIdentityIsExact) {
    const GeopotentialState s = init_state(Preset::bump(0.01, 1), GridSpec::cube(8));
    const StepResult r = step(s, 0.05);
    double lo = 1e300, hi = -1e300;
    for (std::size_t c = 0; c < s.potential().size(); ++c) {
        const double d = r.next.potential()[c] - s.potential()[c] + 0.05 * r.solution.q[c];
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    EXPECT_LT(hi - lo, 1e-12);
}

TEST(Step, QuadraticMatchesDenseOracle) {
    const GridSpec g = GridSpec::cube(5);
    const GeopotentialState s = init_state(Preset::quadratic({2.0, 1.0, 0.5}), g);
    const StepResult r = step(s, 0.01);
    const oracle::Grid og = support::to_oracle(g);
    const oracle::StepOutcome ref = oracle::step(og, support::to_eigen(s.potential()), 0.01);
    EXPECT_LT(oracle::rel_max_diff(support::to_eigen(r.solution.q), ref.sol.q), 1e-9);
    EXPECT_LT(oracle::rel_max_diff(support::to_eigen(r.solution.u), ref.sol.u), 1e-9);
    EXPECT_LT(oracle::rel_max_diff(support::to_eigen(r.next.potential()), ref.next), 1e-9);
}

TEST(Step, BumpMatchesDenseOracle) {
    const GridSpec g({6, 5, 6}, {0, 0, 0}, {1, 1, 1});
    const GeopotentialState s = init_state(Preset::bump(0.02, 1), g);
    const StepResult r = step(s, 0.01);
    const oracle::StepOutcome ref = oracle::step(support::to_oracle(g), support::to_eigen(s.potential()), 0.01);
    EXPECT_LT(oracle::rel_max_diff(support::to_eigen(r.solution.q), ref.sol.q), 1e-9);
    EXPECT_LT(oracle::rel_max_diff(support::to_eigen(r.solution.u), ref.sol.u), 1e-9);
}

TEST(Step, RefusesNonConvexState) {
    const GridSpec g = GridSpec::cube(6);
    const GeopotentialState s = GeopotentialState::create(
        sample_scalar(g, [](const Vec3& x) { return 0.5 * x[0] * x[0] - 0.5 * x[1] * x[1]; }), 0.0);
    EXPECT_THROW(step(s, 0.01), StepRefused);
    EXPECT_THROW(step(init_state(Preset::identity(), g), 0.0), std::invalid_argument);
}

TEST(Run, TiltMatchesMatrixPower) {
    const Vec3 a{0.1, 0.0, 0.05};
    const GeopotentialState s0 = init_state(Preset::tilted(a), GridSpec::cube(8));
    SchemeConfig cfg;
    cfg.epsilon = 0.02;
    cfg.steps = 50;
    const RunResult r = run(s0, cfg, compute_constants(s0));
    EXPECT_EQ(r.halt, HaltReason::Completed);
    EXPECT_EQ(r.steps_taken, 50);
    ASSERT_EQ(r.trajectory.size(), 51u);
    EXPECT_LT(tilt_spread(*r.trajectory.back(), euler_tilt(a, 0.02, 50)), 1e-6);
    EXPECT_NEAR(r.trajectory.back()->time(), 1.0, 1e-12);
    for (const auto& s : r.trajectory) EXPECT_LE(curl_residual(*s), 1e-12);
}

TEST(Run, IdentityStaysConstant) {
    const GeopotentialState s0 = init_state(Preset::identity(), GridSpec::cube(6));
    SchemeConfig cfg;
    cfg.epsilon = 0.1;
    cfg.steps = 10;
    const RunResult r = run(s0, cfg, compute_constants(s0));
    for (const auto& rec : r.records) EXPECT_NEAR(rec.lambda_min, 1.0, 1e-9);
    EXPECT_LT(tilt_spread(*r.trajectory.back(), {0, 0, 0}), 1e-9);
}

TEST(Run, RecordCadenceAndObserver) {
    const GeopotentialState s0 = init_state(Preset::tilted({0.1, 0.2, 0.0}), GridSpec::cube(6));
    SchemeConfig cfg;
    cfg.epsilon = 0.01;
    cfg.steps = 7;
    cfg.log_every = 3;
    std::vector<int> seen;
    const RunResult r = run(s0, cfg, compute_constants(s0),
                            [&](int j, const GeopotentialState&, const DarcySolution* sol) {
                                EXPECT_NE(sol, nullptr);
                                seen.push_back(j);
                            });
    std::vector<int> steps;
    for (const auto& rec : r.records) steps.push_back(rec.step);
    EXPECT_EQ(steps, (std::vector<int>{0, 3, 6, 7}));
    EXPECT_EQ(seen, (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7}));
    for (std::size_t i = 1; i < r.records.size(); ++i) EXPECT_GE(r.records[i].time, r.records[i - 1].time);
}

TEST(Run, HaltsAtConvexityFloor) {
    const GridSpec g = GridSpec::cube(6);
    // Claim an initial modulus of 3 so the measured modulus 1 is below half of it.
    const GeopotentialState s0 = GeopotentialState::create(preset_potential(Preset::identity(), g), 0.0, 3.0);
    SchemeConfig cfg;
    cfg.steps = 5;
    const RunResult r = run(s0, cfg, compute_constants(s0));
    EXPECT_EQ(r.halt, HaltReason::ConvexityFloor);
    EXPECT_EQ(r.steps_taken, 1);
    EXPECT_FALSE(r.halt_detail.empty());

    cfg.halt_below_half_lambda0 = false;
    EXPECT_EQ(run(s0, cfg, compute_constants(s0)).steps_taken, 5);
}

TEST(Run, SolverFailureIsStructuredHalt) {
    const GeopotentialState s0 = init_state(Preset::bump(0.01, 1), GridSpec::cube(8));
    SchemeConfig cfg;
    cfg.steps = 3;
    cfg.solver = {1e-14, 1};
    const RunResult r = run(s0, cfg, compute_constants(s0));
    EXPECT_EQ(r.halt, HaltReason::SolverFailure);
    EXPECT_EQ(r.steps_taken, 0);
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0].solver_iterations, 0);
}

TEST(Growth, IdentityAndTiltPass) {
    for (const Preset& p : {Preset::identity(), Preset::tilted({0.1, 0.0, 0.05})}) {
        const GeopotentialState s0 = init_state(p, GridSpec::cube(8));
        SchemeConfig cfg;
        cfg.epsilon = 0.05;
        cfg.steps = 20;
        const SchemeConstants k = compute_constants(s0);
        const RunResult r = run(s0, cfg, k);
        for (const BoundCheck& b : growth_bound_check(r.trajectory, k)) {
            EXPECT_TRUE(b.ok) << b.value << " > " << b.bound;
            EXPECT_GE(b.margin(), -1e-12);
        }
    }
}

TEST(Growth, DoctoredTrajectoryFailsAtFirstDoctoredStep) {
    const GeopotentialState s0 = init_state(Preset::tilted({0.1, 0.0, 0.05}), GridSpec::cube(8));
    SchemeConfig cfg;
    cfg.epsilon = 0.01;
    cfg.steps = 6;
    const SchemeConstants k = compute_constants(s0);
    RunResult r = run(s0, cfg, k);
    for (std::size_t j = 3; j < r.trajectory.size(); ++j) {
        ScalarField p = r.trajectory[j]->potential();
        for (double& x : p) x *= 2.0;
        r.trajectory[j] = std::make_shared<const GeopotentialState>(
            GeopotentialState::create(p, r.trajectory[j]->time(), r.trajectory[j]->lambda0()));
    }
    const auto checks = growth_bound_check(r.trajectory, k);
    for (std::size_t j = 0; j < checks.size(); ++j) EXPECT_EQ(checks[j].ok, j < 3) << j;
}
