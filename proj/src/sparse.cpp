#include "sgeuler/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sgeuler {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

std::string to_string(KrylovMethod m) { return m == KrylovMethod::ConjugateGradient ? "cg" : "bicgstab"; }

CsrMatrix CsrMatrix::from_rows(std::size_t n, const std::vector<std::vector<Entry>>& rows) {
    if (rows.size() != n) throw std::invalid_argument("row count mismatch");
    CsrMatrix m;
    m.row_ptr_.assign(n + 1, 0);
    std::vector<Entry> merged;
    for (std::size_t r = 0; r < n; ++r) {
        merged = rows[r];
        std::sort(merged.begin(), merged.end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
        std::size_t i = 0;
        while (i < merged.size()) {
            const std::size_t col = merged[i].col;
            if (col >= n) throw std::invalid_argument("column index out of range");
            double v = 0.0;
            while (i < merged.size() && merged[i].col == col) v += merged[i++].value;
            if (v != 0.0) {
                m.cols_.push_back(col);
                m.vals_.push_back(v);
            }
        }
        m.row_ptr_[r + 1] = m.cols_.size();
    }
    return m;
}

void CsrMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
    const std::size_t n = size();
    y.assign(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        double acc = 0.0;
        for (std::size_t e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e) acc += vals_[e] * x[cols_[e]];
        y[r] = acc;
    }
}

std::vector<double> CsrMatrix::diagonal() const {
    std::vector<double> d(size(), 0.0);
    for (std::size_t r = 0; r < size(); ++r) d[r] = at(r, r);
    return d;
}

double CsrMatrix::at(std::size_t row, std::size_t col) const {
    const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
    const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
    const auto it = std::lower_bound(first, last, col);
    if (it == last || *it != col) return 0.0;
    return vals_[static_cast<std::size_t>(it - cols_.begin())];
}

bool CsrMatrix::is_symmetric() const {
    for (std::size_t r = 0; r < size(); ++r) {
        for (std::size_t e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e) {
            if (at(cols_[e], r) != vals_[e]) return false;
        }
    }
    return true;
}

std::vector<std::vector<double>> CsrMatrix::to_dense() const {
    std::vector<std::vector<double>> d(size(), std::vector<double>(size(), 0.0));
    for (std::size_t r = 0; r < size(); ++r)
        for (std::size_t e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e) d[r][cols_[e]] = vals_[e];
    return d;
}

void subtract_mean(std::vector<double>& v) {
    if (v.empty()) return;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    for (double& x : v) x -= mean;
}

KrylovResult conjugate_gradient(const CsrMatrix& a, std::vector<double> b, double tol, int maxiter) {
    const std::size_t n = a.size();
    subtract_mean(b);
    KrylovResult res;
    res.x.assign(n, 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        res.converged = true;
        res.residual_history.push_back(0.0);
        return res;
    }

    std::vector<double> inv_diag = a.diagonal();
    for (double& d : inv_diag) d = d != 0.0 ? 1.0 / d : 1.0;

    std::vector<double> r = b;
    std::vector<double> z(n), p(n), ap(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    subtract_mean(z);
    p = z;
    double rz = dot(r, z);
    res.residual_history.push_back(1.0);

    for (int it = 1; it <= maxiter; ++it) {
        a.multiply(p, ap);
        const double pap = dot(p, ap);
        if (pap <= 0.0) break;  // lost definiteness
        const double alpha = rz / pap;
        for (std::size_t i = 0; i < n; ++i) {
            res.x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        subtract_mean(r);
        const double rel = norm2(r) / bnorm;
        res.residual_history.push_back(rel);
        res.iterations = it;
        res.relative_residual = rel;
        if (rel <= tol) {
            res.converged = true;
            break;
        }
        for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        subtract_mean(z);
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    subtract_mean(res.x);
    return res;
}

KrylovResult bicgstab(const CsrMatrix& a, std::vector<double> b, double tol, int maxiter) {
    const std::size_t n = a.size();
    subtract_mean(b);
    KrylovResult res;
    res.x.assign(n, 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        res.converged = true;
        res.residual_history.push_back(0.0);
        return res;
    }

    std::vector<double> inv_diag = a.diagonal();
    for (double& d : inv_diag) d = d != 0.0 ? 1.0 / d : 1.0;
    auto precondition = [&](const std::vector<double>& in, std::vector<double>& out) {
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = inv_diag[i] * in[i];
        subtract_mean(out);
    };

    std::vector<double> r = b;
    const std::vector<double> r_hat = r;
    std::vector<double> p(n, 0.0), v(n, 0.0), s(n), t(n), p_hat(n), s_hat(n);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    res.residual_history.push_back(1.0);

    for (int it = 1; it <= maxiter; ++it) {
        const double rho_next = dot(r_hat, r);
        if (rho_next == 0.0) break;
        if (it == 1) {
            p = r;
        } else {
            const double beta = (rho_next / rho) * (alpha / omega);
            for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        rho = rho_next;
        precondition(p, p_hat);
        a.multiply(p_hat, v);
        const double rv = dot(r_hat, v);
        if (rv == 0.0) break;
        alpha = rho / rv;
        for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        res.iterations = it;
        const double s_rel = norm2(s) / bnorm;
        if (s_rel <= tol) {
            for (std::size_t i = 0; i < n; ++i) res.x[i] += alpha * p_hat[i];
            res.residual_history.push_back(s_rel);
            res.relative_residual = s_rel;
            res.converged = true;
            break;
        }
        precondition(s, s_hat);
        a.multiply(s_hat, t);
        const double tt = dot(t, t);
        omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            res.x[i] += alpha * p_hat[i] + omega * s_hat[i];
            r[i] = s[i] - omega * t[i];
        }
        subtract_mean(r);
        const double rel = norm2(r) / bnorm;
        res.residual_history.push_back(rel);
        res.relative_residual = rel;
        if (rel <= tol) {
            res.converged = true;
            break;
        }
        if (omega == 0.0) break;
    }
    subtract_mean(res.x);
    return res;
}

}  // namespace sgeuler
