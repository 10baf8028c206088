#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "dfc/dispersion.hpp"
#include "dfc/graph.hpp"
#include "dfc/vec2.hpp"

namespace dfc {

// Per-agent consensus estimator state: p_hat tracks the agent's own
// barycentric coordinate, c_hat the deviation of its partial covariance
// from the swarm average. Zero initialization satisfies the zero-sum
// condition both estimators need.
struct EstimatorState {
    std::vector<Vec2> p_hat;
    std::vector<Sym2> c_hat;

    static EstimatorState zeros(std::size_t n) {
        EstimatorState s;
        s.p_hat.assign(n, Vec2{});
        s.c_hat.assign(n, Sym2{});
        return s;
    }
};

// d/dt p_hat_i = -sum_{j in N_i} ((p_hat_i - p_hat_j) - (p_i - p_j))
// Raw right-hand side; timescale factors are applied by the integrator.
// Each derivative reads only neighbor estimates and relative positions.
inline void centroid_estimator_derivative(std::span<const Vec2> p_hat,
                                          std::span<const Vec2> p,
                                          const AdjacencyList& adj,
                                          std::span<Vec2> out) {
    for (std::size_t i = 0; i < p_hat.size(); ++i) {
        Vec2 d{0.0, 0.0};
        for (std::uint32_t j : adj[i])
            d -= (p_hat[i] - p_hat[j]) - (p[i] - p[j]);
        out[i] = d;
    }
}

// Same consensus structure for the three covariance coefficients. `source`
// is the agent-local input: the true partial covariance in open loop, or
// outer(p_hat_i) when the centroid estimate feeds the covariance estimate.
inline void covariance_estimator_derivative(std::span<const Sym2> c_hat,
                                            std::span<const Sym2> source,
                                            const AdjacencyList& adj,
                                            std::span<Sym2> out) {
    for (std::size_t i = 0; i < c_hat.size(); ++i) {
        Sym2 d;
        for (std::uint32_t j : adj[i])
            d += (source[i] - source[j]) - (c_hat[i] - c_hat[j]);
        out[i] = d;
    }
}

// Agent i's belief about the global covariance matrix.
inline Sym2 recovered_covariance(const EstimatorState& est, std::size_t i) {
    return outer(est.p_hat[i]) - est.c_hat[i];
}

struct EstimationErrors {
    std::vector<double> y_norm;  // || p_hat_i - (p_i - p_c) ||
    std::vector<double> d_norm;  // || c_hat_i - (C_i - C) ||_F
};

// Omniscient diagnostics against ground truth; not available to agents.
inline EstimationErrors estimation_errors(std::span<const Vec2> positions,
                                          const EstimatorState& est) {
    if (positions.size() != est.p_hat.size())
        throw std::invalid_argument("estimation_errors: size mismatch");
    const CloudStats stats = covariance(positions);
    EstimationErrors out;
    out.y_norm.resize(positions.size());
    out.d_norm.resize(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const Vec2 z = positions[i] - stats.centroid;
        out.y_norm[i] = norm(est.p_hat[i] - z);
        out.d_norm[i] = frobenius_norm(est.c_hat[i] - (outer(z) - stats.covariance));
    }
    return out;
}

// Partial covariance sources (p_i - p_c)(p_i - p_c)^T for open-loop use.
inline std::vector<Sym2> partial_covariances(std::span<const Vec2> positions) {
    const CloudStats stats = covariance(positions);
    std::vector<Sym2> c(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
        c[i] = outer(positions[i] - stats.centroid);
    return c;
}

}  // namespace dfc
