#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace dfc {

// Minimal dense row-major matrix. Enough for incidence/Laplacian work at
// desk scale (a few hundred vertices); not a general linear-algebra type.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw std::invalid_argument("matmul: shape mismatch");
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline Matrix transpose(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
    return t;
}

inline double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    for (double v : a.data) s += v * v;
    return std::sqrt(s);
}

namespace detail {

inline double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

}  // namespace detail

// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, ascending.
// tol is relative to max(1, ||A||_F). Throws if the sweep bound is hit
// before the off-diagonal mass drops below tolerance (never silent).
inline std::vector<double> symmetric_eigenvalues(Matrix a, double tol = 1e-10,
                                                 long max_sweeps = -1) {
    if (a.rows != a.cols) throw std::invalid_argument("symmetric_eigenvalues: not square");
    const std::size_t n = a.rows;
    if (n == 0) return {};
    if (n == 1) return {a(0, 0)};
    if (max_sweeps < 0) max_sweeps = 10 * static_cast<long>(n) * static_cast<long>(n);

    const double stop = tol * std::max(1.0, frobenius_norm(a));
    for (long sweep = 0;; ++sweep) {
        if (detail::off_diagonal_norm(a) <= stop) {
            std::vector<double> ev(n);
            for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
            std::sort(ev.begin(), ev.end());
            return ev;
        }
        if (sweep >= max_sweeps) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    throw std::runtime_error("symmetric_eigenvalues: Jacobi iteration did not converge "
                             "within the sweep bound");
}

}  // namespace dfc
