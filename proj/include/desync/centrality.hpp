#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "desync/error.hpp"
#include "desync/graph.hpp"

namespace desync {

enum class CentralityKind { degree, betweenness, functionability };

struct CentralityScores {
    CentralityKind kind;
    std::vector<double> values; // one per node, finite and >= 0
};

inline CentralityScores degree_scores(const Graph& g) {
    CentralityScores s{CentralityKind::degree, std::vector<double>(g.num_nodes())};
    for (int v = 0; v < g.num_nodes(); ++v) s.values[v] = static_cast<double>(g.degree(v));
    return s;
}

/// Exact shortest-path betweenness (Brandes). Each unordered node pair is
/// counted once, endpoints excluded, no normalization.
inline CentralityScores betweenness_scores(const Graph& g) {
    int n = g.num_nodes();
    std::vector<double> bc(n, 0.0);
    std::vector<int> dist(n), sigma(n), order;
    std::vector<double> delta(n);
    std::vector<std::vector<int>> preds(n);
    order.reserve(n);

    for (int s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(sigma.begin(), sigma.end(), 0);
        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto& p : preds) p.clear();
        order.clear();

        dist[s] = 0;
        sigma[s] = 1;
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            order.push_back(u);
            for (int w : g.neighbors(u)) {
                if (dist[w] == -1) {
                    dist[w] = dist[u] + 1;
                    q.push(w);
                }
                if (dist[w] == dist[u] + 1) {
                    sigma[w] += sigma[u];
                    preds[w].push_back(u);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            int w = *it;
            for (int u : preds[w])
                delta[u] += (static_cast<double>(sigma[u]) / sigma[w]) * (1.0 + delta[w]);
            if (w != s) bc[w] += delta[w];
        }
    }
    // The source loop visits every ordered pair; halve for unordered counting.
    for (double& x : bc) x *= 0.5;
    return {CentralityKind::betweenness, std::move(bc)};
}

/// Node score favoring high degree and peripheral placement, evaluated from
/// the Laplacian pseudoinverse. For each node k the score is
///   (alpha * d_k)^2 / (2N) * sum_i (Lpinv_{ik})^2,
/// which equals the defining double sum over one-row-one-column Laplacian
/// minors: with M = L(k,l), the grand sum of (M M^T)^{-1} is |M^{-1} 1|^2,
/// and the minor solves collapse to shifted columns of the pseudoinverse,
///   sum_l |L(k,l)^{-1} 1|^2 = 2 N^3 * sum_i (Lpinv_{ik})^2.
/// One spectral factorization therefore serves every (k,l) pair.
inline CentralityScores functionability_scores(const Graph& g, double alpha = 0.5) {
    int n = g.num_nodes();
    if (n < 2) throw std::invalid_argument("functionability_scores: need at least 2 nodes");
    if (!(alpha > 0.0))
        throw std::invalid_argument("functionability_scores: alpha must be positive");
    if (!is_connected(g))
        throw std::invalid_argument("functionability_scores: graph must be connected");

    Eigen::MatrixXd L = laplacian(g);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
    if (es.info() != Eigen::Success)
        throw NumericalError("functionability_scores: eigensolver failed");
    const auto& lam = es.eigenvalues();
    const auto& Q = es.eigenvectors();
    double lam_max = lam(n - 1);
    double cut = 1e-12 * std::max(1.0, lam_max);
    if (n >= 2 && lam(1) <= cut)
        throw NumericalError("functionability_scores: near-singular Laplacian");

    CentralityScores s{CentralityKind::functionability, std::vector<double>(n)};
    for (int k = 0; k < n; ++k) {
        double col_norm2 = 0.0;
        for (int mu = 0; mu < n; ++mu) {
            if (lam(mu) <= cut) continue;
            double t = Q(k, mu) / lam(mu);
            col_norm2 += t * t;
        }
        double dk = static_cast<double>(g.degree(k));
        s.values[k] = alpha * alpha * dk * dk * col_norm2 / (2.0 * n);
    }
    return s;
}

/// Smallest eigenvalue of the Laplacian with controller rows/columns removed;
/// strictly positive when the graph is connected and controllers are nonempty.
inline double reduced_laplacian_min_eig(const Graph& g, const NodeSet& controllers) {
    if (controllers.empty())
        throw std::invalid_argument("reduced_laplacian_min_eig: empty controller set");
    validate_node_set(g, controllers, "reduced_laplacian_min_eig");
    int n = g.num_nodes();
    if (static_cast<int>(controllers.size()) >= n)
        throw std::invalid_argument("reduced_laplacian_min_eig: controllers cover all nodes");

    std::vector<bool> removed(n, false);
    for (int c : controllers) removed[c] = true;
    std::vector<int> keep;
    keep.reserve(n - controllers.size());
    for (int v = 0; v < n; ++v)
        if (!removed[v]) keep.push_back(v);

    Eigen::MatrixXd L = laplacian(g);
    int m = static_cast<int>(keep.size());
    Eigen::MatrixXd Lt(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) Lt(i, j) = L(keep[i], keep[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Lt, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericalError("reduced_laplacian_min_eig: eigensolver failed");
    return es.eigenvalues()(0);
}

} // namespace desync
