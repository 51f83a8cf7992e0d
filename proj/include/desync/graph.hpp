#pragma once

#include <algorithm>
#include <queue>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "desync/error.hpp"

namespace desync {

/// Sentinel for "no path" in hop-distance vectors.
inline constexpr int kUnreachable = -1;

/// Ordered list of distinct node indices (controllers, cores, ...).
using NodeSet = std::vector<int>;

/// Immutable simple undirected unweighted graph. Construction normalizes the
/// edge set (self-loops dropped, duplicates collapsed, endpoints sorted) and
/// builds a CSR adjacency with sorted neighbor rows; instances are safe to
/// share across threads.
class Graph {
public:
    Graph() = default;

    static Graph from_edges(int n_nodes, std::span<const std::pair<int, int>> edges) {
        if (n_nodes < 0) throw std::invalid_argument("graph: negative node count");
        std::vector<std::pair<int, int>> norm;
        norm.reserve(edges.size());
        for (auto [u, v] : edges) {
            if (u < 0 || v < 0 || u >= n_nodes || v >= n_nodes)
                throw std::invalid_argument("graph: edge index out of range");
            if (u == v) continue;
            norm.emplace_back(std::min(u, v), std::max(u, v));
        }
        std::sort(norm.begin(), norm.end());
        norm.erase(std::unique(norm.begin(), norm.end()), norm.end());
        return Graph(n_nodes, std::move(norm));
    }

    static Graph from_edges(int n_nodes, const std::vector<std::pair<int, int>>& edges) {
        return from_edges(n_nodes, std::span<const std::pair<int, int>>(edges));
    }

    int num_nodes() const { return n_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    /// Unique edges as (u, v) pairs with u < v, lexicographically sorted.
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    std::span<const int> neighbors(int v) const {
        return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
    }

    int degree(int v) const { return offsets_[v + 1] - offsets_[v]; }

    std::vector<int> degrees() const {
        std::vector<int> d(n_);
        for (int v = 0; v < n_; ++v) d[v] = degree(v);
        return d;
    }

    bool has_edge(int u, int v) const {
        auto nb = neighbors(u);
        return std::binary_search(nb.begin(), nb.end(), v);
    }

private:
    Graph(int n, std::vector<std::pair<int, int>> sorted_unique_edges)
        : n_(n), edges_(std::move(sorted_unique_edges)) {
        offsets_.assign(n_ + 1, 0);
        for (auto [u, v] : edges_) {
            ++offsets_[u + 1];
            ++offsets_[v + 1];
        }
        for (int i = 0; i < n_; ++i) offsets_[i + 1] += offsets_[i];
        adj_.resize(edges_.size() * 2);
        std::vector<int> cursor(offsets_.begin(), offsets_.end() - 1);
        for (auto [u, v] : edges_) {
            adj_[cursor[u]++] = v;
            adj_[cursor[v]++] = u;
        }
        for (int v = 0; v < n_; ++v)
            std::sort(adj_.begin() + offsets_[v], adj_.begin() + offsets_[v + 1]);
    }

    int n_ = 0;
    std::vector<std::pair<int, int>> edges_;
    std::vector<int> offsets_{0};
    std::vector<int> adj_;
};

/// Hop counts from `source`; unreachable nodes get kUnreachable.
inline std::vector<int> bfs_distances(const Graph& g, int source) {
    if (source < 0 || source >= g.num_nodes())
        throw std::invalid_argument("bfs_distances: source out of range");
    std::vector<int> dist(g.num_nodes(), kUnreachable);
    std::queue<int> q;
    dist[source] = 0;
    q.push(source);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int w : g.neighbors(u)) {
            if (dist[w] == kUnreachable) {
                dist[w] = dist[u] + 1;
                q.push(w);
            }
        }
    }
    return dist;
}

/// Hop count to the nearest of several sources.
inline std::vector<int> bfs_distances_multi(const Graph& g, const NodeSet& sources) {
    std::vector<int> dist(g.num_nodes(), kUnreachable);
    std::queue<int> q;
    for (int s : sources) {
        if (s < 0 || s >= g.num_nodes())
            throw std::invalid_argument("bfs_distances_multi: source out of range");
        if (dist[s] != 0) {
            dist[s] = 0;
            q.push(s);
        }
    }
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int w : g.neighbors(u)) {
            if (dist[w] == kUnreachable) {
                dist[w] = dist[u] + 1;
                q.push(w);
            }
        }
    }
    return dist;
}

inline bool is_connected(const Graph& g) {
    if (g.num_nodes() == 0) return false;
    auto d = bfs_distances(g, 0);
    return std::none_of(d.begin(), d.end(), [](int x) { return x == kUnreachable; });
}

struct LccResult {
    Graph graph;
    /// original_index[i] = index the i-th retained node had in the input graph.
    std::vector<int> original_index;
};

/// Largest connected component, nodes relabeled densely in ascending original
/// order. Size ties go to the component containing the smallest original index.
inline LccResult largest_connected_component(const Graph& g) {
    int n = g.num_nodes();
    if (n == 0) throw std::invalid_argument("largest_connected_component: empty graph");
    std::vector<int> comp(n, -1);
    std::vector<int> comp_size;
    for (int v = 0; v < n; ++v) {
        if (comp[v] != -1) continue;
        int id = static_cast<int>(comp_size.size());
        int size = 0;
        std::queue<int> q;
        comp[v] = id;
        q.push(v);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            ++size;
            for (int w : g.neighbors(u)) {
                if (comp[w] == -1) {
                    comp[w] = id;
                    q.push(w);
                }
            }
        }
        comp_size.push_back(size);
    }
    // Components are discovered in order of their smallest member, so the
    // first maximal one is the tie-break winner.
    int best = 0;
    for (int c = 1; c < static_cast<int>(comp_size.size()); ++c)
        if (comp_size[c] > comp_size[best]) best = c;

    std::vector<int> original_index;
    std::vector<int> new_index(n, -1);
    for (int v = 0; v < n; ++v) {
        if (comp[v] == best) {
            new_index[v] = static_cast<int>(original_index.size());
            original_index.push_back(v);
        }
    }
    std::vector<std::pair<int, int>> edges;
    for (auto [u, v] : g.edges())
        if (comp[u] == best && comp[v] == best)
            edges.emplace_back(new_index[u], new_index[v]);
    return {Graph::from_edges(static_cast<int>(original_index.size()), edges),
            std::move(original_index)};
}

/// L = diag(degrees) - A.
inline Eigen::MatrixXd laplacian(const Graph& g) {
    int n = g.num_nodes();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (auto [u, v] : g.edges()) {
        L(u, v) -= 1.0;
        L(v, u) -= 1.0;
        L(u, u) += 1.0;
        L(v, v) += 1.0;
    }
    return L;
}

inline void validate_node_set(const Graph& g, const NodeSet& nodes, const char* what) {
    std::vector<bool> seen(g.num_nodes(), false);
    for (int v : nodes) {
        if (v < 0 || v >= g.num_nodes())
            throw std::invalid_argument(std::string(what) + ": node index out of range");
        if (seen[v]) throw std::invalid_argument(std::string(what) + ": duplicate node index");
        seen[v] = true;
    }
}

} // namespace desync
