#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "manufactured.hpp"
#include "sgeuler/divcurl.hpp"
#include "support.hpp"

using namespace sgeuler;

namespace {

// Random coefficient with diagonal in [2, 3] and off-diagonals in [-0.3, 0.3].
TensorField random_spd(const GridSpec& g, unsigned seed, bool symmetric) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> diag(2.0, 3.0), off(-0.3, 0.3);
    TensorField t(g, symmetric);
    for (Mat3& m : t) {
        for (int a = 0; a < 3; ++a) {
            m[a][a] = diag(rng);
            for (int b = a + 1; b < 3; ++b) {
                m[a][b] = off(rng);
                m[b][a] = symmetric ? m[a][b] : off(rng);
            }
        }
    }
    return t;
}

VectorField random_vector(const GridSpec& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VectorField v(g);
    for (Vec3& x : v) x = {u(rng), u(rng), u(rng)};
    return v;
}

double max_entry_diff(const CsrMatrix& a, const Eigen::MatrixXd& b) {
    const auto d = a.to_dense();
    double m = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j)
            m = std::max(m, std::abs(d[i][j] - b(static_cast<long>(i), static_cast<long>(j))));
    return m;
}

}  // namespace

TEST(Invert, MatchesEigenAndRejectsSingular) {
    const GridSpec g = GridSpec::cube(4);
    const TensorField t = random_spd(g, 1, false);
    const TensorField inv = invert_3x3(t);
    const auto te = support::to_eigen(t);
    const auto ie = support::to_eigen(inv);
    for (std::size_t c = 0; c < te.size(); ++c) EXPECT_LT((ie[c] - te[c].inverse()).norm(), 1e-13);

    TensorField s(g, true, identity3());
    s.at(1, 2, 3) = diag3(1.0, 1.0, 0.0);
    try {
        invert_3x3(s);
        FAIL() << "expected SingularCellError";
    } catch (const SingularCellError& e) {
        EXPECT_EQ(e.cell(), (CellIndex{1, 2, 3}));
    }
}

TEST(Invert, SymmetricInputGivesExactlySymmetricInverse) {
    const GridSpec g = GridSpec::cube(4);
    const TensorField inv = invert_3x3(random_spd(g, 5, true));
    EXPECT_TRUE(inv.symmetric());
    EXPECT_TRUE(inv.exactly_symmetric());
}

TEST(DivCurlData, RejectsIndefiniteCoefficientNamingTheCell) {
    const GridSpec g = GridSpec::cube(5);
    TensorField a(g, true, identity3());
    a.at(4, 0, 2) = diag3(1.0, -0.5, 1.0);
    try {
        DivCurlData d(a, VectorField(g));
        FAIL() << "expected EllipticityError";
    } catch (const EllipticityError& e) {
        EXPECT_EQ(e.cell(), (CellIndex{4, 0, 2}));
        EXPECT_DOUBLE_EQ(e.eigenvalue(), -0.5);
    }
}

TEST(DivCurlData, RejectsMismatchedGridsAndNonFiniteInput) {
    const GridSpec g = GridSpec::cube(5);
    EXPECT_THROW(DivCurlData(TensorField(g, true, identity3()), VectorField(GridSpec::cube(6))), std::invalid_argument);
    VectorField f(g);
    f[3][1] = std::nan("");
    EXPECT_THROW(DivCurlData(TensorField(g, true, identity3()), f), std::invalid_argument);
}

TEST(DivCurlData, NonsymmetricCoefficientWithDefiniteSymmetricPartIsAccepted) {
    const GridSpec g = GridSpec::cube(4);
    TensorField a(g, false, Mat3{{{1.0, 3.0, 0.0}, {-3.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}});
    const DivCurlData d(a, VectorField(g));
    EXPECT_FALSE(d.symmetric());
    EXPECT_DOUBLE_EQ(d.ellipticity().value, 1.0);
}

TEST(Darcy, AssemblyMatchesIndependentDenseAssembly) {
    const GridSpec g({5, 4, 6}, {0.1, -0.2, 0.3}, {1.0, 0.8, 1.3});
    for (bool sym : {true, false}) {
        const DivCurlData d(random_spd(g, 11, sym), random_vector(g, 12));
        const DarcyProblem p = reduce_to_darcy(d);
        const oracle::System o =
            oracle::assemble(support::to_oracle(g), support::to_eigen(d.a()), support::to_eigen(d.f()));
        EXPECT_LT(max_entry_diff(p.op, o.op), 1e-10 * o.op.cwiseAbs().maxCoeff());
        for (std::size_t i = 0; i < p.rhs.size(); ++i) EXPECT_NEAR(p.rhs[i], o.rhs(static_cast<long>(i)), 1e-11);
    }
}

TEST(Darcy, NullSpacesAreConstants) {
    const GridSpec g({5, 5, 4}, {0, 0, 0}, {1, 1, 1});
    const DivCurlData d(random_spd(g, 21, false), random_vector(g, 22));
    const DarcyProblem p = reduce_to_darcy(d);
    const auto dense = p.op.to_dense();
    double scale = 0.0;
    for (std::size_t i = 0; i < dense.size(); ++i) {
        double row = 0.0, col = 0.0;
        for (std::size_t j = 0; j < dense.size(); ++j) {
            row += dense[i][j];
            col += dense[j][i];
            scale = std::max(scale, std::abs(dense[i][j]));
        }
        EXPECT_NEAR(row, 0.0, 1e-12 * scale * 10);
        EXPECT_NEAR(col, 0.0, 1e-12 * scale * 10);
    }
    EXPECT_NEAR(std::accumulate(p.rhs.begin(), p.rhs.end(), 0.0), 0.0, 1e-11);
}

TEST(Darcy, InteriorStencilHasNineteenPoints) {
    const GridSpec g = GridSpec::cube(7);
    const DarcyProblem p = reduce_to_darcy(DivCurlData(random_spd(g, 31, true), random_vector(g, 32)));
    const std::size_t row = g.index(3, 3, 3);
    EXPECT_EQ(p.op.row_ptr()[row + 1] - p.op.row_ptr()[row], 19u);
}

TEST(Darcy, SourceCompatibilityWithBoundaryFlux) {
    const GridSpec g({6, 5, 7}, {0, 0, 0}, {1.0, 1.5, 0.7});
    const DarcyProblem p = reduce_to_darcy(DivCurlData(random_spd(g, 41, false), random_vector(g, 42)));
    const double total = std::accumulate(p.source.begin(), p.source.end(), 0.0) * g.cell_volume();
    EXPECT_NEAR(total, -p.boundary_flux, 1e-12 * (1.0 + std::abs(p.boundary_flux)));
}

TEST(Darcy, SolverChoiceFollowsOperatorSymmetry) {
    const GridSpec g = GridSpec::cube(5);
    TensorField diag(g, true);
    for (std::size_t c = 0; c < diag.size(); ++c) diag[c] = diag3(1.0 + 0.01 * static_cast<double>(c % 7), 2.0, 1.5);
    const VectorField f = random_vector(g, 51);
    EXPECT_EQ(solve_divcurl(DivCurlData(diag, f)).method, KrylovMethod::ConjugateGradient);
    EXPECT_EQ(solve_divcurl(DivCurlData(random_spd(g, 52, true), f)).method, KrylovMethod::BiCGStab);
}

TEST(Darcy, KrylovMatchesDenseOracleOnSmallGrids) {
    const std::vector<std::array<int, 3>> shapes = {{4, 4, 4}, {5, 5, 5}, {6, 6, 6}, {4, 5, 6}};
    unsigned seed = 60;
    for (const auto& dims : shapes) {
        const GridSpec g(dims, {0, 0, 0}, {1.0, 1.1, 0.9});
        for (bool sym : {true, false}) {
            const DivCurlData d(random_spd(g, seed++, sym), random_vector(g, seed++));
            const DarcySolution sol = solve_divcurl(d);
            const auto f = support::to_eigen(d.f());
            const oracle::Grid og = support::to_oracle(g);
            const oracle::Solution ref = oracle::solve(og, oracle::assemble(og, support::to_eigen(d.a()), f), f);
            EXPECT_LT(oracle::rel_max_diff(support::to_eigen(sol.q), ref.q), 1e-9);
            EXPECT_LT(oracle::rel_max_diff(support::to_eigen(sol.u), ref.u), 1e-9);
        }
    }
}

TEST(Darcy, ConstantSourceWithIdentityCoefficientGivesZeroVelocity) {
    const GridSpec g = GridSpec::cube(6);
    const Vec3 f0{0.3, -0.2, 0.5};
    const DivCurlData d(TensorField(g, true, identity3()), VectorField(g, f0));
    const DarcySolution sol = solve_divcurl(d);
    EXPECT_LT(lp_norm(sol.u, kInfinity), 1e-9);
    // q = -f0 . x up to a constant
    const VectorField x = coordinates(g);
    double mean = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) mean += dot(f0, x[c]);
    mean /= static_cast<double>(x.size());
    for (std::size_t c = 0; c < x.size(); ++c) EXPECT_NEAR(sol.q[c], -(dot(f0, x[c]) - mean), 1e-9);
    EXPECT_FALSE(sol.estimates.applicable);
}

TEST(Darcy, SolutionIsLinearInTheSource) {
    const GridSpec g = GridSpec::cube(6);
    const TensorField a = random_spd(g, 71, false);
    const VectorField f1 = random_vector(g, 72), f2 = random_vector(g, 73);
    VectorField f12(g);
    for (std::size_t c = 0; c < f12.size(); ++c) f12[c] = f1[c] + 2.0 * f2[c];
    const SolverOptions tight{1e-13, 0};
    const DarcySolution s1 = solve_divcurl(DivCurlData(a, f1), tight);
    const DarcySolution s2 = solve_divcurl(DivCurlData(a, f2), tight);
    const DarcySolution s12 = solve_divcurl(DivCurlData(a, f12), tight);
    double worst = 0.0, scale = 0.0;
    for (std::size_t c = 0; c < f12.size(); ++c) {
        worst = std::max(worst, norm(s12.u[c] - (s1.u[c] + 2.0 * s2.u[c])));
        scale = std::max(scale, norm(s12.u[c]));
    }
    EXPECT_LT(worst, 1e-10 * scale);
}

TEST(Darcy, ReportedResidualIsTrueResidualAndFluxDivergenceIsSmall) {
    const GridSpec g = GridSpec::cube(8);
    const DivCurlData d(random_spd(g, 81, false), random_vector(g, 82));
    const DarcyProblem p = reduce_to_darcy(d);
    const DarcySolution sol = solve_darcy(p);
    std::vector<double> lq;
    p.op.multiply(sol.q.values(), lq);
    double r = 0.0, b = 0.0, bmax = 0.0;
    for (std::size_t i = 0; i < lq.size(); ++i) {
        r += (p.rhs[i] - lq[i]) * (p.rhs[i] - lq[i]);
        b += p.rhs[i] * p.rhs[i];
        bmax = std::max(bmax, std::abs(p.rhs[i]));
    }
    EXPECT_NEAR(sol.residual, std::sqrt(r / b), 1e-14);
    EXPECT_LE(sol.residual, 1e-10);
    EXPECT_LE(sol.flux_divergence, 10 * 1e-10 * std::sqrt(b));
    EXPECT_GE(sol.residual_history.size(), 2u);
    EXPECT_NEAR(std::accumulate(sol.q.begin(), sol.q.end(), 0.0), 0.0, 1e-10);
}

TEST(Darcy, NonConvergenceThrowsWithHistory) {
    const GridSpec g = GridSpec::cube(8);
    const DivCurlData d(random_spd(g, 91, true), random_vector(g, 92));
    try {
        solve_divcurl(d, {1e-12, 2});
        FAIL() << "expected SolverFailure";
    } catch (const SolverFailure& e) {
        EXPECT_FALSE(e.residual_history().empty());
    }
}

TEST(Darcy, ManufacturedSolutionConvergesAtSecondOrder) {
    const double e8 = manufactured::velocity_error(8);
    const double e16 = manufactured::velocity_error(16);
    const double ratio = e8 / e16;
    EXPECT_GT(ratio, 3.4) << e8 << " " << e16;
    EXPECT_LT(ratio, 4.6) << e8 << " " << e16;
}

TEST(Darcy, EstimateRatiosAreFiniteForCurlSources) {
    const GridSpec g = GridSpec::cube(8);
    const DarcySolution sol = solve_divcurl(manufactured::problem(g));
    ASSERT_TRUE(sol.estimates.applicable);
    EXPECT_GT(sol.estimates.u_ratio, 0.0);
    EXPECT_GT(sol.estimates.au_ratio, 0.0);
    EXPECT_TRUE(std::isfinite(sol.estimates.u_ratio));
}
