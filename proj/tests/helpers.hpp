#pragma once

// Test-side oracles, deliberately independent of the library's own
// integrator and spectral code paths.

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "dfc/graph.hpp"
#include "dfc/vec2.hpp"

namespace oracle {

// plain RK4 over a std::vector state, written from scratch for the tests
inline std::vector<double> integrate(
    const std::function<std::vector<double>(double, const std::vector<double>&)>& f,
    std::vector<double> y, double t0, double t1, int steps) {
    const double h = (t1 - t0) / steps;
    for (int k = 0; k < steps; ++k) {
        const double t = t0 + k * h;
        const std::vector<double> k1 = f(t, y);
        std::vector<double> tmp(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        const std::vector<double> k2 = f(t + 0.5 * h, tmp);
        for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        const std::vector<double> k3 = f(t + 0.5 * h, tmp);
        for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + h * k3[i];
        const std::vector<double> k4 = f(t + h, tmp);
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] += h / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    }
    return y;
}

inline double integrate_scalar(const std::function<double(double, double)>& f, double y0,
                               double t1, int steps = 20000) {
    auto vf = [&](double t, const std::vector<double>& y) {
        return std::vector<double>{f(t, y[0])};
    };
    return integrate(vf, {y0}, 0.0, t1, steps)[0];
}

// independent dense multiply for the L = B B^T cross-check
inline std::vector<std::vector<double>> times_own_transpose(const dfc::Matrix& b) {
    std::vector<std::vector<double>> out(b.rows, std::vector<double>(b.rows, 0.0));
    for (std::size_t i = 0; i < b.rows; ++i)
        for (std::size_t j = 0; j < b.rows; ++j)
            for (std::size_t k = 0; k < b.cols; ++k) out[i][j] += b(i, k) * b(j, k);
    return out;
}

// component count by plain DFS over the edge list
inline int component_count(std::size_t n, const std::vector<dfc::Edge>& edges) {
    std::vector<std::vector<std::size_t>> adj(n);
    for (const dfc::Edge& e : edges) {
        adj[e.tail].push_back(e.head);
        adj[e.head].push_back(e.tail);
    }
    std::vector<char> seen(n, 0);
    int comps = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (seen[s]) continue;
        ++comps;
        std::vector<std::size_t> stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            for (std::size_t w : adj[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
        }
    }
    return comps;
}

inline dfc::Graph random_graph(std::mt19937& rng, std::size_t n, double p) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<dfc::Edge> edges;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
            if (u(rng) < p) edges.push_back({i, j});
    return dfc::Graph(n, std::move(edges));
}

inline dfc::Graph random_connected_graph(std::mt19937& rng, std::size_t n, double p) {
    for (int tries = 0; tries < 1000; ++tries) {
        dfc::Graph g = random_graph(rng, n, p);
        if (dfc::is_connected(g)) return g;
        p = std::min(1.0, p * 1.3);
    }
    throw std::runtime_error("random_connected_graph: give up");
}

inline std::vector<dfc::Vec2> random_cloud(std::mt19937& rng, std::size_t n,
                                           double half_x = 2.0, double half_y = 1.0) {
    std::uniform_real_distribution<double> ux(-half_x, half_x), uy(-half_y, half_y);
    std::vector<dfc::Vec2> p(n);
    for (auto& v : p) v = {ux(rng), uy(rng)};
    return p;
}

}  // namespace oracle
