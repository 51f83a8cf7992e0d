#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "desync/dynamics.hpp"
#include "desync/graph.hpp"

namespace desync {

/// Mean of R(t) over the post-transient window t >= transient_fraction * t_end.
inline double asymptotic_order(const Trajectory& traj, double transient_fraction = 0.5) {
    if (transient_fraction < 0.0 || transient_fraction >= 1.0)
        throw std::invalid_argument("asymptotic_order: transient_fraction must be in [0,1)");
    if (traj.times.empty()) throw std::invalid_argument("asymptotic_order: empty trajectory");
    double t_end = traj.times.back();
    double cut = transient_fraction * t_end - 1e-12;
    double sum = 0.0;
    long count = 0;
    for (size_t i = 0; i < traj.times.size(); ++i) {
        if (traj.times[i] >= cut) {
            sum += traj.R_series[i];
            ++count;
        }
    }
    if (count == 0) throw std::invalid_argument("asymptotic_order: empty post-transient window");
    return sum / static_cast<double>(count);
}

/// Controlled-to-uncontrolled asymptotic order ratio; the baseline must be
/// bounded away from zero for the ratio to mean anything.
inline double normalized_order(double controlled, double uncontrolled, double eps = 1e-6) {
    if (!(uncontrolled > eps))
        throw NumericalError("normalized_order: degenerate uncontrolled baseline");
    return controlled / uncontrolled;
}

/// Grid of mean/std normalized order over (m, c) cells; row_axis holds the
/// controller counts (or core counts k for core-split sweeps). Cells whose
/// replicas all failed carry NaN and n_valid = 0.
struct SweepResult {
    std::vector<int> m_axis;
    std::vector<double> c_axis;
    std::vector<double> mean_rhat; // row-major, m-major
    std::vector<double> std_rhat;
    std::vector<int> n_valid;
    int replicas = 0;
    double threshold = 0.15;

    size_t index(size_t im, size_t ic) const { return im * c_axis.size() + ic; }
    size_t size() const { return m_axis.size() * c_axis.size(); }
};

/// Fraction of grid cells whose ensemble-mean normalized order is at or
/// below the threshold. NaN cells never count as passing.
inline double delta_fraction(const SweepResult& sweep, double threshold) {
    if (sweep.size() == 0) throw std::invalid_argument("delta_fraction: empty grid");
    long hit = 0;
    for (double v : sweep.mean_rhat)
        if (v <= threshold) ++hit;
    return static_cast<double>(hit) / static_cast<double>(sweep.size());
}

inline double delta_fraction(const SweepResult& sweep) {
    return delta_fraction(sweep, sweep.threshold);
}

/// Sample Pearson correlation coefficient.
inline double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("pearson: need two equal-length vectors of size >= 2");
    size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("pearson: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

/// Mean hop distance from unpinned nodes to their nearest controller,
/// normalized by the all-pairs mean distance of the graph.
inline double controller_distance_stats(const Graph& g, const NodeSet& controllers) {
    if (controllers.empty())
        throw std::invalid_argument("controller_distance_stats: empty controller set");
    validate_node_set(g, controllers, "controller_distance_stats");
    if (static_cast<int>(controllers.size()) >= g.num_nodes())
        throw std::invalid_argument("controller_distance_stats: no unpinned nodes");

    auto dist = bfs_distances_multi(g, controllers);
    std::vector<bool> pinned(g.num_nodes(), false);
    for (int c : controllers) pinned[c] = true;

    double raw_sum = 0.0;
    long raw_count = 0;
    for (int v = 0; v < g.num_nodes(); ++v) {
        if (pinned[v]) continue;
        if (dist[v] == kUnreachable)
            throw std::invalid_argument("controller_distance_stats: graph not connected");
        raw_sum += dist[v];
        ++raw_count;
    }
    double raw_mean = raw_sum / static_cast<double>(raw_count);

    double all_sum = 0.0;
    long all_count = 0;
    for (int s = 0; s < g.num_nodes(); ++s) {
        auto d = bfs_distances(g, s);
        for (int v = s + 1; v < g.num_nodes(); ++v) {
            if (d[v] == kUnreachable)
                throw std::invalid_argument("controller_distance_stats: graph not connected");
            all_sum += d[v];
            ++all_count;
        }
    }
    return raw_mean / (all_sum / static_cast<double>(all_count));
}

struct SmallWorldStats {
    double clustering = 0.0; // mean of local clustering coefficients
    double mean_path = 0.0;  // all-pairs mean hop distance
};

inline SmallWorldStats small_world_stats(const Graph& g) {
    int n = g.num_nodes();
    if (n < 2) throw std::invalid_argument("small_world_stats: need at least 2 nodes");

    double clustering = 0.0;
    for (int v = 0; v < n; ++v) {
        int d = g.degree(v);
        if (d < 2) continue; // local coefficient 0 by convention
        auto nb = g.neighbors(v);
        long tri = 0;
        for (size_t i = 0; i < nb.size(); ++i)
            for (size_t j = i + 1; j < nb.size(); ++j)
                if (g.has_edge(nb[i], nb[j])) ++tri;
        clustering += 2.0 * static_cast<double>(tri) / (static_cast<double>(d) * (d - 1));
    }
    clustering /= static_cast<double>(n);

    double sum = 0.0;
    long count = 0;
    for (int s = 0; s < n; ++s) {
        auto d = bfs_distances(g, s);
        for (int v = s + 1; v < n; ++v) {
            if (d[v] == kUnreachable)
                throw std::invalid_argument("small_world_stats: graph not connected");
            sum += d[v];
            ++count;
        }
    }
    return {clustering, sum / static_cast<double>(count)};
}

} // namespace desync
