#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <numeric>

#include "sgeuler/sparse.hpp"

using namespace sgeuler;

namespace {

// D^T W D with D the 1D difference operator: both null spaces are the
// constants. W = I + skew (S - S^T) with S the shift makes it nonsymmetric.
CsrMatrix neumann_laplacian(std::size_t n, double skew = 0.0) {
    const std::size_t m = n - 1;
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<long>(m), static_cast<long>(n));
    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(static_cast<long>(m), static_cast<long>(m));
    for (std::size_t i = 0; i < m; ++i) {
        d(static_cast<long>(i), static_cast<long>(i)) = -1.0;
        d(static_cast<long>(i), static_cast<long>(i + 1)) = 1.0;
        if (i + 1 < m) {
            w(static_cast<long>(i), static_cast<long>(i + 1)) = skew;
            w(static_cast<long>(i + 1), static_cast<long>(i)) = -skew;
        }
    }
    const Eigen::MatrixXd l = d.transpose() * w * d;
    std::vector<std::vector<CsrMatrix::Entry>> rows(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) rows[i].push_back({j, l(static_cast<long>(i), static_cast<long>(j))});
    return CsrMatrix::from_rows(n, rows);
}

std::vector<double> zero_mean_rhs(std::size_t n) {
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = std::sin(0.7 * static_cast<double>(i)) + 0.1 * static_cast<double>(i);
    subtract_mean(b);
    return b;
}

double residual(const CsrMatrix& a, const std::vector<double>& x, const std::vector<double>& b) {
    std::vector<double> ax;
    a.multiply(x, ax);
    double r = 0, nb = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        r += (b[i] - ax[i]) * (b[i] - ax[i]);
        nb += b[i] * b[i];
    }
    return std::sqrt(r / nb);
}

}  // namespace

TEST(Csr, SumsDuplicatesAndDropsZeros) {
    std::vector<std::vector<CsrMatrix::Entry>> rows = {{{0, 1.0}, {0, 2.0}, {1, 0.0}}, {{1, 5.0}, {0, -1.0}}};
    const CsrMatrix m = CsrMatrix::from_rows(2, rows);
    EXPECT_EQ(m.nonzeros(), 3u);
    EXPECT_EQ(m.at(0, 0), 3.0);
    EXPECT_EQ(m.at(0, 1), 0.0);
    EXPECT_EQ(m.at(1, 0), -1.0);
    EXPECT_FALSE(m.is_symmetric());
    const auto d = m.diagonal();
    EXPECT_EQ(d[0], 3.0);
    EXPECT_EQ(d[1], 5.0);
}

TEST(Csr, SymmetryDetection) {
    EXPECT_TRUE(neumann_laplacian(6).is_symmetric());
    EXPECT_FALSE(neumann_laplacian(6, 0.1).is_symmetric());
}

TEST(Krylov, ConjugateGradientSolvesSingularNeumannSystem) {
    const CsrMatrix a = neumann_laplacian(40);
    const auto b = zero_mean_rhs(40);
    const KrylovResult r = conjugate_gradient(a, b, 1e-12, 400);
    ASSERT_TRUE(r.converged);
    EXPECT_LT(residual(a, r.x, b), 1e-11);
    EXPECT_NEAR(std::accumulate(r.x.begin(), r.x.end(), 0.0), 0.0, 1e-10);
    EXPECT_FALSE(r.residual_history.empty());
}

TEST(Krylov, BiCGStabSolvesNonsymmetricSingularSystem) {
    const CsrMatrix a = neumann_laplacian(40, 0.2);
    const auto b = zero_mean_rhs(40);
    const KrylovResult r = bicgstab(a, b, 1e-12, 800);
    ASSERT_TRUE(r.converged);
    EXPECT_LT(residual(a, r.x, b), 1e-11);
}

TEST(Krylov, MatchesDenseSolve) {
    const std::size_t n = 12;
    const CsrMatrix a = neumann_laplacian(n);
    const auto b = zero_mean_rhs(n);
    const KrylovResult r = conjugate_gradient(a, b, 1e-14, 200);
    // Augmented dense system [A 1; 1^T 0] as the oracle.
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 1, n + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    const auto dense = a.to_dense();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m(i, j) = dense[i][j];
        m(i, n) = 1.0;
        m(n, i) = 1.0;
        rhs(i) = b[i];
    }
    const Eigen::VectorXd x = m.fullPivLu().solve(rhs);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(r.x[i], x(i), 1e-10);
}

TEST(Krylov, ReportsFailureWithinIterationCap) {
    const CsrMatrix a = neumann_laplacian(200);
    const auto b = zero_mean_rhs(200);
    const KrylovResult r = conjugate_gradient(a, b, 1e-14, 3);
    EXPECT_FALSE(r.converged);
    EXPECT_LE(r.iterations, 3);
    EXPECT_GT(r.relative_residual, 1e-14);
}
