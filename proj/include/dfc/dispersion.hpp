#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>

#include "dfc/vec2.hpp"

namespace dfc {

// Symmetric 2x2 matrix [[c1, c2], [c2, c3]] stored as three scalars, the
// same layout the covariance estimators carry as their per-agent state.
struct Sym2 {
    double c1 = 0.0;  // xx
    double c2 = 0.0;  // xy
    double c3 = 0.0;  // yy

    constexpr Sym2 operator+(const Sym2& o) const { return {c1 + o.c1, c2 + o.c2, c3 + o.c3}; }
    constexpr Sym2 operator-(const Sym2& o) const { return {c1 - o.c1, c2 - o.c2, c3 - o.c3}; }
    constexpr Sym2 operator*(double s) const { return {c1 * s, c2 * s, c3 * s}; }
    Sym2& operator+=(const Sym2& o) { c1 += o.c1; c2 += o.c2; c3 += o.c3; return *this; }

    constexpr Vec2 apply(const Vec2& v) const {
        return {c1 * v.x + c2 * v.y, c2 * v.x + c3 * v.y};
    }
    constexpr double trace() const { return c1 + c3; }
    constexpr double det() const { return c1 * c3 - c2 * c2; }
};

constexpr Sym2 operator*(double s, const Sym2& m) { return m * s; }

constexpr Sym2 outer(const Vec2& v) { return {v.x * v.x, v.x * v.y, v.y * v.y}; }

inline double frobenius_norm(const Sym2& m) {
    return std::sqrt(m.c1 * m.c1 + 2.0 * m.c2 * m.c2 + m.c3 * m.c3);
}

// Ordered spectral decomposition: lambda1 >= lambda2, v1/v2 orthonormal.
struct EigenBasis2 {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    Vec2 v1{1.0, 0.0};
    Vec2 v2{0.0, 1.0};
};

struct DispersionTarget {
    double lambda1_star = 0.0;  // >= lambda2_star
    double lambda2_star = 0.0;  // >= 0
};

struct DispersionError {
    double e1 = 0.0;
    double e2 = 0.0;
};

inline double norm(const DispersionError& e) { return std::hypot(e.e1, e.e2); }

namespace detail {

// flip so the largest-magnitude component is positive
inline Vec2 canonical_sign(const Vec2& v) {
    const double lead = std::abs(v.x) >= std::abs(v.y) ? v.x : v.y;
    return lead < 0.0 ? -v : v;
}

}  // namespace detail

// Closed-form eigendecomposition of a symmetric 2x2 matrix, eigenvalues
// in descending order. The smaller eigenvalue comes from det/lambda_big,
// which is more accurate than the subtractive formula. When the spectrum
// is degenerate (gap below degeneracy_tol) any orthonormal pair works:
// `prev` is reused if given, otherwise the standard axes. For a separated
// spectrum, eigenvector signs follow `prev` so that a smoothly varying
// matrix yields a smoothly varying basis.
inline EigenBasis2 eig_sym2(const Sym2& m, const EigenBasis2* prev = nullptr) {
    const double tr = m.trace();
    const double gap = std::hypot(m.c1 - m.c3, 2.0 * m.c2);  // lambda1 - lambda2
    const double degeneracy_tol = 1e-9 * std::max(1.0, std::abs(tr));

    EigenBasis2 out;
    if (gap <= degeneracy_tol) {
        out.lambda1 = 0.5 * (tr + gap);
        out.lambda2 = 0.5 * (tr - gap);
        if (prev) {
            out.v1 = prev->v1;
            out.v2 = prev->v2;
        }  // else keep the standard axes
        return out;
    }

    const double big = tr >= 0.0 ? 0.5 * (tr + gap) : 0.5 * (tr - gap);
    const double other = big != 0.0 ? m.det() / big : 0.0;
    out.lambda1 = std::max(big, other);
    out.lambda2 = std::min(big, other);

    // eigenvector from the better-conditioned row of (M - lambda1*I)
    Vec2 v1;
    if (std::abs(m.c1 - out.lambda1) > std::abs(m.c3 - out.lambda1)) {
        const double f = std::hypot(m.c2, out.lambda1 - m.c1);
        v1 = f == 0.0 ? Vec2{1.0, 0.0} : Vec2{m.c2 / f, (out.lambda1 - m.c1) / f};
    } else {
        const double f = std::hypot(out.lambda1 - m.c3, m.c2);
        v1 = f == 0.0 ? Vec2{1.0, 0.0} : Vec2{(out.lambda1 - m.c3) / f, m.c2 / f};
    }
    Vec2 v2 = perp(v1);

    if (prev) {
        if (dot(v1, prev->v1) < 0.0) v1 = -v1;
        if (dot(v2, prev->v2) < 0.0) v2 = -v2;
    } else {
        v1 = detail::canonical_sign(v1);
        v2 = detail::canonical_sign(v2);
    }
    out.v1 = v1;
    out.v2 = v2;
    return out;
}

inline Sym2 reconstruct(const EigenBasis2& b) {
    return b.lambda1 * outer(b.v1) + b.lambda2 * outer(b.v2);
}

struct CloudStats {
    Vec2 centroid;
    Sym2 covariance;
};

// Population covariance (1/N denominator) about the arithmetic-mean
// centroid. Needs at least two points.
inline CloudStats covariance(std::span<const Vec2> positions) {
    if (positions.size() < 2)
        throw std::invalid_argument("covariance: needs at least 2 points");
    Vec2 c{0.0, 0.0};
    for (const Vec2& p : positions) c += p;
    c = c / static_cast<double>(positions.size());
    Sym2 cov;
    for (const Vec2& p : positions) cov += outer(p - c);
    return {c, cov * (1.0 / static_cast<double>(positions.size()))};
}

// Spectral error against the target dispersion, with both spectra in
// descending order. Returns the basis so callers can keep continuity.
inline std::pair<DispersionError, EigenBasis2>
dispersion_error(const Sym2& c, const DispersionTarget& target,
                 const EigenBasis2* prev = nullptr) {
    const EigenBasis2 basis = eig_sym2(c, prev);
    return {{basis.lambda1 - target.lambda1_star, basis.lambda2 - target.lambda2_star}, basis};
}

// Real symmetric matrices are similar exactly when their spectra agree.
inline bool covariance_similar(const Sym2& a, const Sym2& b, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("covariance_similar: tol must be positive");
    const EigenBasis2 ea = eig_sym2(a);
    const EigenBasis2 eb = eig_sym2(b);
    return std::abs(ea.lambda1 - eb.lambda1) <= tol &&
           std::abs(ea.lambda2 - eb.lambda2) <= tol;
}

}  // namespace dfc
