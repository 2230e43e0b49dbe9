#pragma once

// Fixed-size 3-vectors and 3x3 matrices.

#include <array>
#include <cmath>

namespace sgeuler {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Rotation generator J = [[0,-1,0],[1,0,0],[0,0,0]].
inline Vec3 apply_j(const Vec3& v) { return {-v[1], v[0], 0.0}; }

inline Mat3 identity3() { return {{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}}; }
inline Mat3 diag3(double a, double b, double c) { return {{{a, 0.0, 0.0}, {0.0, b, 0.0}, {0.0, 0.0, c}}}; }

inline Vec3 operator*(const Mat3& m, const Vec3& v) {
    return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

inline Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 c{};
    for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s)
            for (int t = 0; t < 3; ++t) c[r][s] += a[r][t] * b[t][s];
    return c;
}

inline Mat3 operator+(const Mat3& a, const Mat3& b) {
    Mat3 c{};
    for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) c[r][s] = a[r][s] + b[r][s];
    return c;
}

inline Mat3 operator-(const Mat3& a, const Mat3& b) {
    Mat3 c{};
    for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) c[r][s] = a[r][s] - b[r][s];
    return c;
}

inline Mat3 operator*(double s, const Mat3& a) {
    Mat3 c{};
    for (int r = 0; r < 3; ++r)
        for (int t = 0; t < 3; ++t) c[r][t] = s * a[r][t];
    return c;
}

inline Mat3 transpose(const Mat3& a) {
    Mat3 t{};
    for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) t[r][s] = a[s][r];
    return t;
}

inline Mat3 symmetric_part(const Mat3& a) { return 0.5 * (a + transpose(a)); }

inline Mat3 outer(const Vec3& a, const Vec3& b) {
    Mat3 m{};
    for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) m[r][s] = a[r] * b[s];
    return m;
}

inline double frobenius(const Mat3& a) {
    double s = 0.0;
    for (const auto& row : a)
        for (double x : row) s += x * x;
    return std::sqrt(s);
}

inline double determinant(const Mat3& a) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

/// Adjugate divided by determinant; caller checks the determinant.
Mat3 inverse_unchecked(const Mat3& a);

/// Eigenvalues of a symmetric matrix in ascending order (cyclic Jacobi).
Vec3 symmetric_eigenvalues(const Mat3& a);

/// Largest singular value.
double spectral_norm(const Mat3& a);

}  // namespace sgeuler
