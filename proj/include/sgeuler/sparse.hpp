#pragma once

// Compressed-row matrices and the Krylov iterations used for the scalar
// Neumann problems. Both iterations work on singular systems whose null
// space (left and right) is the constant vector: the right-hand side and
// the iterates are projected onto the mean-zero subspace.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sgeuler {

class CsrMatrix {
public:
    struct Entry {
        std::size_t col;
        double value;
    };

    CsrMatrix() = default;

    /// Rows may contain repeated columns; they are summed. Exact zeros are
    /// kept out of the pattern.
    static CsrMatrix from_rows(std::size_t n, const std::vector<std::vector<Entry>>& rows);

    std::size_t size() const { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
    std::size_t nonzeros() const { return cols_.size(); }

    void multiply(const std::vector<double>& x, std::vector<double>& y) const;
    std::vector<double> diagonal() const;
    double at(std::size_t row, std::size_t col) const;
    /// Exact (bitwise) symmetry of values and pattern.
    bool is_symmetric() const;
    std::vector<std::vector<double>> to_dense() const;

    const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
    const std::vector<std::size_t>& cols() const { return cols_; }
    const std::vector<double>& values() const { return vals_; }

private:
    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> cols_;
    std::vector<double> vals_;
};

enum class KrylovMethod { ConjugateGradient, BiCGStab };

std::string to_string(KrylovMethod m);

struct KrylovResult {
    std::vector<double> x;
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
    std::vector<double> residual_history;
};

/// Raised when an iteration fails to reach the requested tolerance.
class SolverFailure : public std::runtime_error {
public:
    SolverFailure(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), history_(std::move(history)) {}
    const std::vector<double>& residual_history() const { return history_; }

private:
    std::vector<double> history_;
};

void subtract_mean(std::vector<double>& v);

/// Jacobi-preconditioned conjugate gradients for a symmetric positive
/// semi-definite matrix with constant null space.
KrylovResult conjugate_gradient(const CsrMatrix& a, std::vector<double> b, double tol, int maxiter);

/// Jacobi-preconditioned BiCGStab for non-symmetric matrices whose left and
/// right null spaces are the constants.
KrylovResult bicgstab(const CsrMatrix& a, std::vector<double> b, double tol, int maxiter);

}  // namespace sgeuler
