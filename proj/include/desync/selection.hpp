#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <string_view>

#include "desync/centrality.hpp"
#include "desync/graph.hpp"
#include "desync/rng.hpp"

namespace desync {

enum class SelectionStrategy { random, degree, functionability, betweenness_high, betweenness_low };

inline std::string to_string(SelectionStrategy s) {
    switch (s) {
        case SelectionStrategy::random: return "random";
        case SelectionStrategy::degree: return "degree";
        case SelectionStrategy::functionability: return "functionability";
        case SelectionStrategy::betweenness_high: return "betweenness-high";
        case SelectionStrategy::betweenness_low: return "betweenness-low";
    }
    return "?";
}

inline SelectionStrategy strategy_from_string(std::string_view name) {
    if (name == "random") return SelectionStrategy::random;
    if (name == "degree") return SelectionStrategy::degree;
    if (name == "functionability") return SelectionStrategy::functionability;
    if (name == "betweenness-high" || name == "betweenness_high")
        return SelectionStrategy::betweenness_high;
    if (name == "betweenness-low" || name == "betweenness_low")
        return SelectionStrategy::betweenness_low;
    throw std::invalid_argument("unknown selection strategy: " + std::string(name));
}

/// Scores backing a score-based strategy; computed on demand when callers
/// have no cached copy.
inline CentralityScores strategy_scores(const Graph& g, SelectionStrategy s,
                                        double alpha = 0.5) {
    switch (s) {
        case SelectionStrategy::degree: return degree_scores(g);
        case SelectionStrategy::functionability: return functionability_scores(g, alpha);
        case SelectionStrategy::betweenness_high:
        case SelectionStrategy::betweenness_low: return betweenness_scores(g);
        case SelectionStrategy::random: break;
    }
    throw std::invalid_argument("strategy_scores: random strategy has no scores");
}

namespace detail {

/// Top-m (or bottom-m) of `candidates` by score, ties broken by ascending
/// node index; result sorted ascending.
inline NodeSet pick_by_score(const std::vector<int>& candidates, const std::vector<double>& score,
                             int m, bool lowest_first) {
    std::vector<int> idx = candidates;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (score[a] != score[b]) return lowest_first ? score[a] < score[b] : score[a] > score[b];
        return a < b;
    });
    NodeSet out(idx.begin(), idx.begin() + m);
    std::sort(out.begin(), out.end());
    return out;
}

/// Uniform m-subset without replacement (partial Fisher-Yates); sorted ascending.
inline NodeSet pick_random(const std::vector<int>& candidates, int m, RngStream& rng) {
    std::vector<int> pool = candidates;
    for (int i = 0; i < m; ++i) {
        size_t j = i + rng.uniform_below(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    NodeSet out(pool.begin(), pool.begin() + m);
    std::sort(out.begin(), out.end());
    return out;
}

inline NodeSet select_from(const Graph& g, const std::vector<int>& candidates,
                           SelectionStrategy strategy, int m, RngStream& rng,
                           const CentralityScores* cached) {
    if (m < 0 || m > static_cast<int>(candidates.size()))
        throw std::invalid_argument("select: m out of range");
    if (m == 0) return {};
    if (strategy == SelectionStrategy::random) return pick_random(candidates, m, rng);
    CentralityScores local{CentralityKind::degree, {}};
    const CentralityScores* sc = cached;
    if (!sc) {
        local = strategy_scores(g, strategy);
        sc = &local;
    }
    if (static_cast<int>(sc->values.size()) != g.num_nodes())
        throw std::invalid_argument("select: score vector size mismatch");
    bool lowest = strategy == SelectionStrategy::betweenness_low;
    return pick_by_score(candidates, sc->values, m, lowest);
}

} // namespace detail

/// Pinned-node choice over the whole node set.
inline NodeSet select_controllers(const Graph& g, SelectionStrategy strategy, int m,
                                  RngStream& rng, const CentralityScores* cached = nullptr) {
    std::vector<int> all(g.num_nodes());
    std::iota(all.begin(), all.end(), 0);
    return detail::select_from(g, all, strategy, m, rng, cached);
}

/// Exactly k_core controllers from `core` and m - k_core from its complement,
/// each side chosen by the strategy restricted to that side.
inline NodeSet select_core_split(const Graph& g, const NodeSet& core, int k_core, int m,
                                 SelectionStrategy strategy, RngStream& rng,
                                 const CentralityScores* cached = nullptr) {
    validate_node_set(g, core, "select_core_split");
    if (k_core < 0 || k_core > m) throw std::invalid_argument("select_core_split: bad k_core");
    if (k_core > static_cast<int>(core.size()))
        throw std::invalid_argument("select_core_split: k_core exceeds core size");
    int n_periph = g.num_nodes() - static_cast<int>(core.size());
    if (m - k_core > n_periph)
        throw std::invalid_argument("select_core_split: periphery quota exceeds periphery size");

    std::vector<bool> in_core(g.num_nodes(), false);
    for (int v : core) in_core[v] = true;
    std::vector<int> periph;
    periph.reserve(n_periph);
    for (int v = 0; v < g.num_nodes(); ++v)
        if (!in_core[v]) periph.push_back(v);

    std::vector<int> core_sorted(core);
    std::sort(core_sorted.begin(), core_sorted.end());
    NodeSet out = detail::select_from(g, core_sorted, strategy, k_core, rng, cached);
    NodeSet rest = detail::select_from(g, periph, strategy, m - k_core, rng, cached);
    out.insert(out.end(), rest.begin(), rest.end());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace desync
