#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dfc/dispersion.hpp"
#include "dfc/vec2.hpp"

namespace dfc {

// Inputs of the centralized dispersion law: barycentric positions (must
// sum to zero), the covariance eigenbasis, and the spectral error.
struct CentralizedControlInput {
    std::vector<Vec2> barycentric;
    EigenBasis2 basis;
    DispersionError error;
};

// u_i = -(e1 <z_i, v1> v1 + e2 <z_i, v2> v2). Contracts the cloud along an
// eigenvector when the variance there is too large, expands it when too
// small; the velocities sum to zero, so the centroid stays put.
inline std::vector<Vec2> centralized_velocities(const CentralizedControlInput& in) {
    std::vector<Vec2> u(in.barycentric.size());
    for (std::size_t i = 0; i < in.barycentric.size(); ++i) {
        const double eta1 = dot(in.barycentric[i], in.basis.v1);
        const double eta2 = dot(in.barycentric[i], in.basis.v2);
        u[i] = -(in.error.e1 * eta1 * in.basis.v1 + in.error.e2 * eta2 * in.basis.v2);
    }
    return u;
}

inline std::vector<Vec2> barycentric_coordinates(std::span<const Vec2> positions) {
    Vec2 c{0.0, 0.0};
    for (const Vec2& p : positions) c += p;
    c = c / static_cast<double>(positions.size());
    std::vector<Vec2> z(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) z[i] = positions[i] - c;
    return z;
}

struct EigenvalueFlowPoint {
    double value = 0.0;
    // a zero eigenvalue with a positive target never leaves zero
    bool stuck_at_zero = false;
};

// Closed-form eigenvalue trajectory under the centralized law. Each
// eigenvalue obeys d(lambda)/dt = -2 (lambda - lambda*) lambda, whose
// error solution is
//   e(t) = lambda* e0 exp(-2 lambda* t) / (e0 + lambda* - e0 exp(-2 lambda* t))
// for lambda* > 0, and e(t) = e0 / (2 e0 t + 1) when lambda* = 0.
inline EigenvalueFlowPoint eigenvalue_flow(double lambda0, double lambda_star, double t) {
    if (lambda0 < 0.0 || lambda_star < 0.0 || t < 0.0)
        throw std::invalid_argument("eigenvalue_flow: negative argument");
    EigenvalueFlowPoint out;
    if (lambda_star > 0.0) {
        if (lambda0 == 0.0) {
            out.value = 0.0;
            out.stuck_at_zero = true;
            return out;
        }
        const double e0 = lambda0 - lambda_star;
        const double q = std::exp(-2.0 * lambda_star * t);
        out.value = lambda_star + lambda_star * e0 * q / (e0 + lambda_star - e0 * q);
    } else {
        // lambda* = 0: algebraic decay, e0 = lambda0 >= 0
        out.value = lambda0 / (2.0 * lambda0 * t + 1.0);
    }
    return out;
}

// Axis scales relating a later snapshot to the initial cloud in the frozen
// eigenbasis. The centralized law only rescales the two eigen-coordinates,
// so every agent must report the same per-axis ratio.
struct ScalingCheck {
    std::optional<double> s1;  // nullopt: no agent had usable initial coordinate
    std::optional<double> s2;
    double max_rel_deviation = 0.0;  // worst per-agent ratio deviation
    bool consistent = false;
};

inline ScalingCheck scaling_certificate(std::span<const Vec2> initial,
                                        std::span<const Vec2> current,
                                        const EigenBasis2& basis0,
                                        double eta_tol = 1e-9,
                                        double rel_tol = 1e-6) {
    if (initial.size() != current.size())
        throw std::invalid_argument("scaling_certificate: size mismatch");
    const std::vector<Vec2> z0 = barycentric_coordinates(initial);
    const std::vector<Vec2> zt = barycentric_coordinates(current);

    ScalingCheck out;
    out.consistent = true;
    for (int axis = 0; axis < 2; ++axis) {
        const Vec2 v = axis == 0 ? basis0.v1 : basis0.v2;
        // least-squares common scale over agents with usable coordinates
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < z0.size(); ++i) {
            const double a = dot(z0[i], v);
            if (std::abs(a) <= eta_tol) continue;
            num += dot(zt[i], v) * a;
            den += a * a;
        }
        if (den == 0.0) continue;  // axis indeterminate
        const double s = num / den;
        double worst = 0.0;
        for (std::size_t i = 0; i < z0.size(); ++i) {
            const double a = dot(z0[i], v);
            if (std::abs(a) <= eta_tol) continue;
            worst = std::max(worst, std::abs(dot(zt[i], v) / a - s) /
                                        std::max(std::abs(s), 1e-300));
        }
        out.max_rel_deviation = std::max(out.max_rel_deviation, worst);
        if (worst > rel_tol) out.consistent = false;
        (axis == 0 ? out.s1 : out.s2) = s;
    }
    return out;
}

}  // namespace dfc
