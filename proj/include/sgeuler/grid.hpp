#pragma once

// Structured cell-centred box grids, the fields living on them, and the
// finite-difference operators used throughout the solver.
//
// Every first derivative is the same 1D stencil: centred in the interior,
// second-order one-sided in the first and last cell of a line. Mixed
// derivatives are tensor products of those 1D stencils along different
// axes, so they commute exactly and curl(gradient(.)) vanishes to roundoff.

#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sgeuler/small_matrix.hpp"

namespace sgeuler {

struct CellIndex {
    int i = 0;
    int j = 0;
    int k = 0;

    bool operator==(const CellIndex&) const = default;
};

std::string to_string(const CellIndex& c);

class GridSpec {
public:
    /// Throws std::invalid_argument if any axis has fewer than 4 cells or a
    /// non-positive extent.
    GridSpec(std::array<int, 3> dims, Vec3 origin, Vec3 extents);

    /// n^3 cells covering [0, extent]^3.
    static GridSpec cube(int n, double extent = 1.0);

    const std::array<int, 3>& dims() const { return dims_; }
    const Vec3& origin() const { return origin_; }
    const Vec3& extents() const { return extents_; }
    const Vec3& spacing() const { return spacing_; }

    int dim(int axis) const { return dims_[static_cast<std::size_t>(axis)]; }
    double h(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }

    std::size_t cell_count() const;
    double cell_volume() const { return spacing_[0] * spacing_[1] * spacing_[2]; }
    double domain_volume() const { return extents_[0] * extents_[1] * extents_[2]; }
    /// Largest |y| over the closed box.
    double max_point_norm() const;

    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(dims_[0]) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims_[1]) * static_cast<std::size_t>(k));
    }
    std::size_t index(const CellIndex& c) const { return index(c.i, c.j, c.k); }
    CellIndex cell(std::size_t idx) const;
    std::size_t stride(int axis) const;

    Vec3 center(int i, int j, int k) const;
    Vec3 center(const CellIndex& c) const { return center(c.i, c.j, c.k); }

    bool operator==(const GridSpec&) const = default;

private:
    std::array<int, 3> dims_;
    Vec3 origin_;
    Vec3 extents_;
    Vec3 spacing_;
};

template <typename T>
class Field {
public:
    using value_type = T;

    explicit Field(GridSpec spec, T fill = T{})
        : spec_(std::move(spec)), values_(spec_.cell_count(), fill) {}

    Field(GridSpec spec, std::vector<T> values) : spec_(std::move(spec)), values_(std::move(values)) {
        if (values_.size() != spec_.cell_count()) {
            throw std::invalid_argument("field value count does not match grid");
        }
    }

    const GridSpec& spec() const { return spec_; }
    std::size_t size() const { return values_.size(); }

    T& operator[](std::size_t idx) { return values_[idx]; }
    const T& operator[](std::size_t idx) const { return values_[idx]; }
    T& at(int i, int j, int k) { return values_[spec_.index(i, j, k)]; }
    const T& at(int i, int j, int k) const { return values_[spec_.index(i, j, k)]; }

    std::vector<T>& values() { return values_; }
    const std::vector<T>& values() const { return values_; }

    auto begin() { return values_.begin(); }
    auto end() { return values_.end(); }
    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

private:
    GridSpec spec_;
    std::vector<T> values_;
};

using ScalarField = Field<double>;
using VectorField = Field<Vec3>;

/// Per-cell 3x3 matrices. The symmetric flag is a promise that every
/// matrix equals its transpose bit for bit.
class TensorField : public Field<Mat3> {
public:
    explicit TensorField(GridSpec spec, bool symmetric = false, Mat3 fill = Mat3{})
        : Field<Mat3>(std::move(spec), fill), symmetric_(symmetric) {}
    TensorField(GridSpec spec, std::vector<Mat3> values, bool symmetric)
        : Field<Mat3>(std::move(spec), std::move(values)), symmetric_(symmetric) {}

    bool symmetric() const { return symmetric_; }
    void set_symmetric(bool s) { symmetric_ = s; }

    /// True when every cell's matrix equals its transpose exactly.
    bool exactly_symmetric() const;

private:
    bool symmetric_;
};

// Sampling helpers (cell centres).
ScalarField sample_scalar(const GridSpec& spec, const std::function<double(const Vec3&)>& fn);
VectorField sample_vector(const GridSpec& spec, const std::function<Vec3(const Vec3&)>& fn);
TensorField sample_tensor(const GridSpec& spec, const std::function<Mat3(const Vec3&)>& fn, bool symmetric);

/// Identity map x -> x on cell centres.
VectorField coordinates(const GridSpec& spec);

ScalarField component(const VectorField& v, int axis);

bool all_finite(const ScalarField& s);
bool all_finite(const VectorField& v);
bool all_finite(const TensorField& t);

// ---------------------------------------------------------------------------
// 1D stencils

/// Up to four (offset, weight) pairs; offsets are relative to the cell.
struct Stencil1D {
    int count = 0;
    std::array<int, 4> offset{};
    std::array<double, 4> weight{};
};

/// d/dx at cell i of a line of n cells: centred inside, one-sided second
/// order in the first and last cell. Exact on quadratics.
Stencil1D first_derivative_stencil(int i, int n, double h);

/// d2/dx2 at cell i: centred inside, four-point one-sided second order at
/// the ends. Exact on cubics.
Stencil1D second_derivative_stencil(int i, int n, double h);

/// Derivative of order 0..3 along one axis using the centred stencil, with
/// the stencil centre shifted inward near faces. Used for the third-order
/// Sobolev seminorm only.
Stencil1D shifted_centered_stencil(int order, int i, int n, double h);

// ---------------------------------------------------------------------------
// Differential operators

ScalarField partial(const ScalarField& s, int axis);
ScalarField second_partial(const ScalarField& s, int axis);

VectorField gradient(const ScalarField& s);
/// Symmetric by construction: each mixed partial is evaluated once per
/// unordered axis pair.
TensorField hessian(const ScalarField& s);
ScalarField divergence(const VectorField& v);
VectorField curl(const VectorField& v);
/// jac(c)[a][b] = d v_a / d x_b.
TensorField jacobian(const VectorField& v);

// ---------------------------------------------------------------------------
// Norms

/// Cell-volume weighted discrete L^p norm of the pointwise magnitude
/// (absolute value, Euclidean norm, Frobenius norm). p = infinity gives the
/// maximum magnitude.
double lp_norm(const ScalarField& s, double p);
double lp_norm(const VectorField& v, double p);
double lp_norm(const TensorField& t, double p);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Sum of the L^p norms of the derivatives of s of orders 1..m (m <= 3).
/// Orders 1 and 2 use gradient/hessian; order 3 uses inward-shifted centred
/// stencils and needs at least 5 cells per axis.
double sobolev_norm(const ScalarField& s, int m, double p);

/// Classical W^{m,p} norm of a vector field: derivatives of orders 0..m.
double vector_sobolev_norm(const VectorField& v, int m, double p);

/// Per-cell Frobenius magnitude of the third-derivative tensor of s.
ScalarField third_derivative_magnitude(const ScalarField& s);

struct EigenMin {
    double value;
    CellIndex cell;
};

/// Smallest eigenvalue over all cells. Throws std::invalid_argument for a
/// field not flagged symmetric.
EigenMin min_hessian_eigenvalue(const TensorField& t);

}  // namespace sgeuler
