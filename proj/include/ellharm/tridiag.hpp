#pragma once

// Small dense/tridiagonal eigen utilities. Matrices here are at most a few
// dozen rows, so robustness wins over asymptotic cost everywhere.

#include "ellharm/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

namespace ellharm {

/// Real tridiagonal matrix; lower[i] = A(i+1, i), upper[i] = A(i, i+1).
struct TridiagonalMatrix {
    std::vector<double> lower, diag, upper;

    std::size_t size() const { return diag.size(); }

    double operator()(std::size_t i, std::size_t j) const {
        if (i == j) return diag[i];
        if (j == i + 1) return upper[i];
        if (i == j + 1) return lower[j];
        return 0.0;
    }

    std::vector<double> apply(const std::vector<double>& v) const {
        const std::size_t n = size();
        std::vector<double> out(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double s = diag[i] * v[i];
            if (i + 1 < n) s += upper[i] * v[i + 1];
            if (i > 0) s += lower[i - 1] * v[i - 1];
            out[i] = s;
        }
        return out;
    }

    /// Max-row-sum norm.
    double norm_inf() const {
        double m = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            double s = std::abs(diag[i]);
            if (i + 1 < size()) s += std::abs(upper[i]);
            if (i > 0) s += std::abs(lower[i - 1]);
            m = std::max(m, s);
        }
        return m;
    }
};

/// ||A v - lambda v||_inf / (||A||_inf ||v||_inf)
inline double eigen_residual(const TridiagonalMatrix& a, double lambda, const std::vector<double>& v) {
    const auto av = a.apply(v);
    double r = 0.0, vn = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        r = std::max(r, std::abs(av[i] - lambda * v[i]));
        vn = std::max(vn, std::abs(v[i]));
    }
    const double scale = a.norm_inf() * vn;
    return scale > 0 ? r / scale : r;
}

struct SymmetricEigen {
    std::vector<double> values;               // ascending
    std::vector<std::vector<double>> vectors; // vectors[k] belongs to values[k]
};

/// Implicit QL with Wilkinson shifts (EISPACK tql2) on a symmetric
/// tridiagonal matrix given by its diagonal and off-diagonal.
inline SymmetricEigen symmetric_tridiagonal_eigen(std::vector<double> d, std::vector<double> off) {
    const std::size_t n = d.size();
    if (n == 0) return {};
    std::vector<double> e(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) e[i] = off[i];
    std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0)); // v[row][col]
    for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

    const double eps = std::numeric_limits<double>::epsilon();
    double f = 0.0, tst1 = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > 60) throw NumericalError("tridiagonal QL iteration did not converge");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double hh = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= hh;
                f += hh;

                p = d[m];
                double c = 1.0, c2 = 1.0, c3 = 1.0;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (std::size_t ii = m; ii-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[ii];
                    hh = c * p;
                    r = std::hypot(p, e[ii]);
                    e[ii + 1] = s * r;
                    s = e[ii] / r;
                    c = p / r;
                    p = c * d[ii] - s * g;
                    d[ii + 1] = hh + s * (c * g + s * d[ii]);
                    for (std::size_t k = 0; k < n; ++k) {
                        hh = v[k][ii + 1];
                        v[k][ii + 1] = s * v[k][ii] + c * hh;
                        v[k][ii] = c * v[k][ii] - s * hh;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    SymmetricEigen out;
    for (std::size_t idx : order) {
        out.values.push_back(d[idx]);
        std::vector<double> col(n);
        for (std::size_t k = 0; k < n; ++k) col[k] = v[k][idx];
        out.vectors.push_back(std::move(col));
    }
    return out;
}

/// Solves (A - shift I) x = rhs by dense LU with partial pivoting; tiny
/// pivots are replaced by eps*||A|| so exact eigenvalue shifts still work.
inline std::vector<double> shifted_solve(const TridiagonalMatrix& a, double shift, std::vector<double> rhs) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = (i > 0 ? i - 1 : 0); j < std::min(n, i + 2); ++j) m[i][j] = a(i, j);
    for (std::size_t i = 0; i < n; ++i) m[i][i] -= shift;
    const double tiny = std::numeric_limits<double>::epsilon() * std::max(a.norm_inf(), std::abs(shift));

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        std::swap(m[piv], m[col]);
        std::swap(rhs[piv], rhs[col]);
        if (std::abs(m[col][col]) < tiny) m[col][col] = m[col][col] < 0 ? -tiny : tiny;
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = m[r][col] / m[col][col];
            if (factor == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) m[r][c] -= factor * m[col][c];
            rhs[r] -= factor * rhs[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= m[i][c] * x[c];
        x[i] = s / m[i][i];
    }
    return x;
}

struct EigenPair {
    double value;
    std::vector<double> vector;
};

/// Eigenpairs of a real tridiagonal matrix whose off-diagonal products
/// A(i,i+1)A(i+1,i) are all positive. The matrix is symmetrized by a diagonal
/// similarity for the eigenvalues; each eigenvector is then refined by inverse
/// iteration on the original matrix. Ascending eigenvalues.
inline std::vector<EigenPair> tridiagonal_eigenpairs(const TridiagonalMatrix& a) {
    const std::size_t n = a.size();
    std::vector<double> off(n > 0 ? n - 1 : 0), scale(n, 1.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double prod = a.upper[i] * a.lower[i];
        if (!(prod > 0)) throw NumericalError("tridiagonal matrix is not symmetrizable (off-diagonal product <= 0)");
        off[i] = std::copysign(std::sqrt(prod), a.upper[i]);
        // S = D A D^-1 with d_{i+1} = d_i sqrt(upper/lower)
        scale[i + 1] = scale[i] * std::sqrt(a.upper[i] / a.lower[i]);
    }
    const auto sym = symmetric_tridiagonal_eigen(a.diag, off);

    std::vector<EigenPair> out;
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = sym.vectors[k][i] / scale[i];
        auto normalize = [](std::vector<double>& x) {
            double m = 0.0;
            for (double xi : x) m = std::max(m, std::abs(xi));
            if (m > 0)
                for (double& xi : x) xi /= m;
        };
        normalize(v);
        for (int it = 0; it < 2; ++it) {
            auto w = shifted_solve(a, sym.values[k], v);
            bool finite = true;
            for (double wi : w) finite = finite && std::isfinite(wi);
            if (!finite) break;
            normalize(w);
            if (eigen_residual(a, sym.values[k], w) <= eigen_residual(a, sym.values[k], v)) v = std::move(w);
        }
        out.push_back({sym.values[k], std::move(v)});
    }
    return out;
}

} // namespace ellharm
