#pragma once

#include <cstdint>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dfc/matrix.hpp"
#include "dfc/vec2.hpp"

namespace dfc {

struct Edge {
    std::uint32_t tail = 0;
    std::uint32_t head = 0;
};

using AdjacencyList = std::vector<std::vector<std::uint32_t>>;

// Undirected interaction topology. Vertices are 0-based internally; the
// config layer converts from the 1-based form used in scenario files.
// Edge orientation (tail/head) is kept as given: the incidence matrix
// depends on it, the Laplacian B*B^T does not.
class Graph {
  public:
    Graph(std::size_t n_vertices, std::vector<Edge> edges)
        : n_(n_vertices), edges_(std::move(edges)) {
        if (n_ == 0) throw std::invalid_argument("graph: needs at least one vertex");
        std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
        for (const Edge& e : edges_) {
            if (e.tail >= n_ || e.head >= n_)
                throw std::invalid_argument("graph: edge endpoint out of range");
            if (e.tail == e.head)
                throw std::invalid_argument("graph: self-loops are not allowed");
            auto key = std::minmax(e.tail, e.head);
            if (!seen.insert(key).second)
                throw std::invalid_argument("graph: duplicate edge " +
                                            std::to_string(key.first + 1) + "-" +
                                            std::to_string(key.second + 1));
        }
        adj_.resize(n_);
        for (const Edge& e : edges_) {
            adj_[e.tail].push_back(e.head);
            adj_[e.head].push_back(e.tail);
        }
    }

    std::size_t n_vertices() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const AdjacencyList& adjacency() const { return adj_; }

  private:
    std::size_t n_;
    std::vector<Edge> edges_;
    AdjacencyList adj_;
};

struct SpectralSummary {
    std::vector<double> laplacian_eigenvalues;  // nondecreasing
    double algebraic_connectivity = 0.0;        // second-smallest eigenvalue
};

// Column k carries +1 at the tail and -1 at the head of edge k.
inline Matrix incidence_matrix(const Graph& g) {
    Matrix b(g.n_vertices(), g.edges().size());
    for (std::size_t k = 0; k < g.edges().size(); ++k) {
        b(g.edges()[k].tail, k) = 1.0;
        b(g.edges()[k].head, k) = -1.0;
    }
    return b;
}

inline Matrix laplacian(const Graph& g) {
    Matrix l(g.n_vertices(), g.n_vertices());
    for (const Edge& e : g.edges()) {
        l(e.tail, e.tail) += 1.0;
        l(e.head, e.head) += 1.0;
        l(e.tail, e.head) -= 1.0;
        l(e.head, e.tail) -= 1.0;
    }
    return l;
}

inline SpectralSummary spectral_summary(const Graph& g, double tol = 1e-10) {
    SpectralSummary s;
    s.laplacian_eigenvalues = symmetric_eigenvalues(laplacian(g), tol);
    s.algebraic_connectivity =
        g.n_vertices() >= 2 ? s.laplacian_eigenvalues[1] : 0.0;
    return s;
}

// Combinatorial reachability from vertex 0; no tolerance involved.
inline bool is_connected(const Graph& g) {
    std::vector<char> visited(g.n_vertices(), 0);
    std::queue<std::uint32_t> frontier;
    frontier.push(0);
    visited[0] = 1;
    std::size_t count = 1;
    while (!frontier.empty()) {
        const std::uint32_t v = frontier.front();
        frontier.pop();
        for (std::uint32_t w : g.adjacency()[v]) {
            if (!visited[w]) {
                visited[w] = 1;
                ++count;
                frontier.push(w);
            }
        }
    }
    return count == g.n_vertices();
}

constexpr std::uint32_t kRemovedVertex = UINT32_MAX;

struct VertexRemoval {
    Graph graph;
    // old index -> new index, kRemovedVertex for victims
    std::vector<std::uint32_t> old_to_new;
};

inline VertexRemoval remove_vertices(const Graph& g,
                                     const std::vector<std::uint32_t>& victims) {
    std::vector<char> dead(g.n_vertices(), 0);
    for (std::uint32_t v : victims) {
        if (v >= g.n_vertices())
            throw std::invalid_argument("remove_vertices: victim out of range");
        dead[v] = 1;
    }
    std::vector<std::uint32_t> old_to_new(g.n_vertices(), kRemovedVertex);
    std::uint32_t next = 0;
    for (std::size_t v = 0; v < g.n_vertices(); ++v)
        if (!dead[v]) old_to_new[v] = next++;
    if (next == 0) throw std::invalid_argument("remove_vertices: no vertices left");

    std::vector<Edge> kept;
    for (const Edge& e : g.edges())
        if (!dead[e.tail] && !dead[e.head])
            kept.push_back({old_to_new[e.tail], old_to_new[e.head]});
    return {Graph(next, std::move(kept)), std::move(old_to_new)};
}

struct GeometricGraphResult {
    Graph graph;
    double radius = 0.0;  // radius that actually produced a connected graph
};

// Connect every pair within `radius`; grow the radius geometrically until
// the graph is connected. Deterministic given the positions.
inline GeometricGraphResult geometric_graph(const std::vector<Vec2>& positions,
                                            double radius, double growth = 1.25,
                                            int max_tries = 64) {
    if (positions.empty())
        throw std::invalid_argument("geometric_graph: empty position set");
    if (radius <= 0.0) throw std::invalid_argument("geometric_graph: radius must be positive");
    const std::size_t n = positions.size();
    double r = radius;
    for (int attempt = 0; attempt < max_tries; ++attempt, r *= growth) {
        std::vector<Edge> edges;
        for (std::uint32_t i = 0; i < n; ++i)
            for (std::uint32_t j = i + 1; j < n; ++j)
                if (norm(positions[i] - positions[j]) <= r) edges.push_back({i, j});
        Graph g(n, std::move(edges));
        if (is_connected(g)) return {std::move(g), r};
    }
    throw std::runtime_error("geometric_graph: could not reach a connected graph");
}

}  // namespace dfc
