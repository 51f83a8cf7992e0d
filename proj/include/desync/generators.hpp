#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "desync/error.hpp"
#include "desync/graph.hpp"
#include "desync/rng.hpp"

namespace desync {

/// Hub node 0 connected to n-1 leaves.
inline Graph gen_star(int n) {
    if (n < 2) throw std::invalid_argument("gen_star: need n >= 2");
    std::vector<std::pair<int, int>> edges;
    edges.reserve(n - 1);
    for (int v = 1; v < n; ++v) edges.emplace_back(0, v);
    return Graph::from_edges(n, edges);
}

/// Circulant ring: every node joined to its k/2 nearest neighbors per side.
inline Graph gen_regular_ring(int n, int k) {
    if (k < 0 || k % 2 != 0) throw std::invalid_argument("gen_regular_ring: k must be even");
    if (k >= n) throw std::invalid_argument("gen_regular_ring: k must be < n");
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<size_t>(n) * k / 2);
    for (int j = 1; j <= k / 2; ++j)
        for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + j) % n);
    return Graph::from_edges(n, edges);
}

/// Watts-Strogatz: ring lattice, then each lattice edge is rewired with
/// probability p_ws to a uniformly drawn target, skipping self-loops and
/// duplicates. Edge count is preserved for every p_ws.
inline Graph gen_watts_strogatz(int n, int k_mean, double p_ws, RngStream& rng) {
    if (k_mean < 0 || k_mean % 2 != 0)
        throw std::invalid_argument("gen_watts_strogatz: k_mean must be even");
    if (k_mean >= n) throw std::invalid_argument("gen_watts_strogatz: k_mean must be < n");
    if (p_ws < 0.0 || p_ws > 1.0)
        throw std::invalid_argument("gen_watts_strogatz: p_ws must be in [0,1]");

    std::set<std::pair<int, int>> present;
    auto key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
    std::vector<std::pair<int, int>> edges;
    for (int j = 1; j <= k_mean / 2; ++j)
        for (int i = 0; i < n; ++i) {
            auto e = key(i, (i + j) % n);
            edges.push_back(e);
            present.insert(e);
        }

    // One rewiring pass per lattice round, mirroring the original procedure.
    size_t idx = 0;
    for (int j = 1; j <= k_mean / 2; ++j) {
        for (int i = 0; i < n; ++i, ++idx) {
            if (rng.next_double() >= p_ws) continue;
            int keep = i;
            auto old_edge = edges[idx];
            int target = -1;
            bool found = false;
            for (int attempt = 0; attempt < 10 * n; ++attempt) {
                target = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n)));
                if (target == keep) continue;
                if (present.count(key(keep, target))) continue;
                found = true;
                break;
            }
            if (!found) continue; // saturated node; keep the lattice edge
            present.erase(old_edge);
            present.insert(key(keep, target));
            edges[idx] = key(keep, target);
        }
    }
    return Graph::from_edges(n, edges);
}

struct CorePeriphery {
    Graph graph;
    NodeSet core; // indices [0, n_core)
};

/// Clique core of n_core nodes; periphery nodes join one at a time, attaching
/// to a uniform core node with probability p and otherwise to a uniform
/// already-placed periphery node. The very first periphery node has no
/// periphery target and always attaches to the core.
inline CorePeriphery gen_core_periphery(int n_core, int n_total, double p, RngStream& rng) {
    if (n_core < 1 || n_core >= n_total)
        throw std::invalid_argument("gen_core_periphery: need 1 <= n_core < n_total");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("gen_core_periphery: p must be in [0,1]");

    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n_core; ++u)
        for (int v = u + 1; v < n_core; ++v) edges.emplace_back(u, v);
    for (int j = n_core; j < n_total; ++j) {
        bool to_core = rng.next_double() < p || j == n_core;
        int target = to_core
                         ? static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n_core)))
                         : n_core + static_cast<int>(
                                        rng.uniform_below(static_cast<std::uint64_t>(j - n_core)));
        edges.emplace_back(target, j);
    }
    NodeSet core(n_core);
    for (int i = 0; i < n_core; ++i) core[i] = i;
    return {Graph::from_edges(n_total, edges), std::move(core)};
}

/// Degree sequence sampled from P(k) proportional to k^gamma on [k_min, k_max],
/// with the sum forced even by resampling single entries.
inline std::vector<int> power_law_degree_sequence(int n, int k_min, int k_max, double gamma,
                                                  RngStream& rng) {
    if (k_min < 1 || k_min > k_max) throw std::invalid_argument("degree sequence: bad k range");
    std::vector<double> cdf(k_max - k_min + 1);
    double acc = 0.0;
    for (int k = k_min; k <= k_max; ++k) {
        acc += std::pow(static_cast<double>(k), gamma);
        cdf[k - k_min] = acc;
    }
    auto draw = [&]() {
        double u = rng.next_double() * acc;
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        return k_min + static_cast<int>(it - cdf.begin());
    };
    std::vector<int> deg(n);
    long long sum = 0;
    for (int i = 0; i < n; ++i) {
        deg[i] = draw();
        sum += deg[i];
    }
    while (sum % 2 != 0) {
        int i = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n)));
        sum -= deg[i];
        deg[i] = draw();
        sum += deg[i];
    }
    return deg;
}

namespace detail {

/// Uniform stub matching projected to a simple graph (self-loops and
/// multi-edges dropped).
inline Graph configuration_model(const std::vector<int>& degrees, RngStream& rng) {
    std::vector<int> stubs;
    for (int v = 0; v < static_cast<int>(degrees.size()); ++v)
        stubs.insert(stubs.end(), degrees[v], v);
    for (size_t i = stubs.size(); i > 1; --i) {
        size_t j = rng.uniform_below(i);
        std::swap(stubs[i - 1], stubs[j]);
    }
    std::vector<std::pair<int, int>> edges;
    edges.reserve(stubs.size() / 2);
    for (size_t i = 0; i + 1 < stubs.size(); i += 2) edges.emplace_back(stubs[i], stubs[i + 1]);
    return Graph::from_edges(static_cast<int>(degrees.size()), edges);
}

} // namespace detail

struct ScaleFreeOptions {
    int k_min = 4;
    int max_attempts = 1000;
};

/// Configuration-model scale-free graph: degrees from P(k) ~ k^gamma on
/// [k_min, n_raw - 1], simple-graph projection, then the largest connected
/// component. The raw size is adapted until the component size lands in
/// [lcc_lo, lcc_hi]; exceeding max_attempts raises GenerationError.
inline Graph gen_scale_free(double gamma, int lcc_lo, int lcc_hi, RngStream& rng,
                            const ScaleFreeOptions& opts = {}) {
    if (gamma < -4.0 || gamma > -2.0)
        throw std::invalid_argument("gen_scale_free: gamma must be in [-4,-2]");
    if (lcc_lo < 2 || lcc_lo > lcc_hi)
        throw std::invalid_argument("gen_scale_free: bad lcc window");

    double target = 0.5 * (lcc_lo + lcc_hi);
    double raw = target;
    int raw_floor = std::max(opts.k_min + 2, 8);
    for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
        int n_raw = std::max(raw_floor, static_cast<int>(std::lround(raw)));
        auto deg = power_law_degree_sequence(n_raw, opts.k_min, n_raw - 1, gamma, rng);
        Graph raw_graph = detail::configuration_model(deg, rng);
        auto lcc = largest_connected_component(raw_graph);
        int size = lcc.graph.num_nodes();
        if (size >= lcc_lo && size <= lcc_hi) return std::move(lcc.graph);
        // Multiplicative size correction, damped to at most a factor 2 per step.
        double factor = std::clamp(target / static_cast<double>(size), 0.5, 2.0);
        raw = std::clamp(raw * factor, static_cast<double>(raw_floor),
                         8.0 * static_cast<double>(lcc_hi));
    }
    throw GenerationError("gen_scale_free: no graph in the LCC window after max_attempts");
}

/// Degree-preserving double-edge swaps ("criss-cross"): pick two edges with
/// four distinct endpoints and exchange one endpoint; swaps that would create
/// a self-loop or duplicate edge are rejected and resampled. Only successful
/// swaps count toward n_switches.
inline Graph criss_cross_reshuffle(const Graph& g, int n_switches, RngStream& rng,
                                   int max_attempts_per_switch = 500) {
    if (n_switches < 0) throw std::invalid_argument("criss_cross_reshuffle: negative switches");
    if (n_switches == 0) return g;
    if (g.num_edges() < 2)
        throw std::invalid_argument("criss_cross_reshuffle: need at least 2 edges");

    std::vector<std::pair<int, int>> edges = g.edges();
    std::set<std::pair<int, int>> present(edges.begin(), edges.end());
    auto key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };

    long long budget = static_cast<long long>(max_attempts_per_switch) * n_switches;
    int done = 0;
    while (done < n_switches) {
        if (budget-- <= 0)
            throw GenerationError("criss_cross_reshuffle: resample budget exhausted");
        size_t i = rng.uniform_below(edges.size());
        size_t j = rng.uniform_below(edges.size());
        if (i == j) continue;
        auto [a, b] = edges[i];
        auto [c, d] = edges[j];
        if (rng.next_u32() & 1u) std::swap(c, d);
        if (a == c || a == d || b == c || b == d) continue;
        auto e1 = key(a, d);
        auto e2 = key(c, b);
        if (present.count(e1) || present.count(e2)) continue;
        present.erase(edges[i]);
        present.erase(edges[j]);
        present.insert(e1);
        present.insert(e2);
        edges[i] = e1;
        edges[j] = e2;
        ++done;
    }
    return Graph::from_edges(g.num_nodes(), edges);
}

} // namespace desync
