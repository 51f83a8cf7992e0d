#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "desync/centrality.hpp"
#include "desync/dynamics.hpp"
#include "desync/generators.hpp"
#include "desync/graph.hpp"
#include "desync/metrics.hpp"
#include "desync/rng.hpp"
#include "desync/selection.hpp"

namespace desync {

struct DynamicsParams {
    double coupling = 4.0; // desk-scale default; see README calibration note
    double dt = 0.05;
    double t_end = 200.0;
    double transient_fraction = 0.5;
    int record_every = 1;
    double omega_mean = 1.0;
    double omega_std = 0.1;
    double freq_gap_min = 1e-3;
    double neighbor_decay = 0.13533528323661270; // exp(-2)
    double baseline_eps = 1e-6;
    int omega_max_attempts = 100;
    double alpha = 0.5; // functionability frustration parameter
};

struct NetworkSource {
    enum class Kind { scale_free, core_periphery, watts_strogatz, ring, star, edge_list };
    Kind kind = Kind::scale_free;

    // scale_free
    double gamma = -3.0;
    int lcc_lo = 85, lcc_hi = 115;
    ScaleFreeOptions sf_opts{};
    // core_periphery
    int n_core = 10;
    double p = 0.7;
    // shared size parameter (n_total for core_periphery)
    int n = 100;
    // watts_strogatz / ring
    int k_mean = 10;
    double p_ws = 0.1;
    // edge_list
    std::string path;
    long reshuffle_swaps = 0; // 0 = none, -1 = half the edge count
};

struct ExperimentPlan {
    NetworkSource network;
    SelectionStrategy strategy = SelectionStrategy::degree;
    std::vector<int> m_axis;
    std::vector<double> c_axis;
    int replicas = 100;
    std::uint64_t seed = 0;
    double threshold = 0.15;
    DynamicsParams dyn;
    std::optional<int> core_split_m; // set => sweep over k = 0..m at fixed m
};

inline void validate_plan(const ExperimentPlan& plan) {
    if (plan.c_axis.empty()) throw ConfigError("plan: empty c axis");
    if (plan.replicas < 1) throw ConfigError("plan: replicas must be >= 1");
    if (plan.core_split_m) {
        if (plan.network.kind != NetworkSource::Kind::core_periphery)
            throw ConfigError("plan: core-split sweeps require a core-periphery source");
        if (*plan.core_split_m < 0) throw ConfigError("plan: core_split m must be >= 0");
    } else if (plan.m_axis.empty()) {
        throw ConfigError("plan: empty m axis");
    }
}

/// A network fixed for the whole sweep (ingested file or pre-generated
/// realization), with centrality scores computed once up front.
struct FixedNetwork {
    Graph graph;
    NodeSet core;
    bool has_core = false;
    std::optional<CentralityScores> scores;
};

inline std::optional<CentralityScores> precompute_scores(const Graph& g, SelectionStrategy s,
                                                         double alpha) {
    if (s == SelectionStrategy::random) return std::nullopt;
    return strategy_scores(g, s, alpha);
}

struct CellStats {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double stddev = std::numeric_limits<double>::quiet_NaN();
    int n_valid = 0;
    int n_degenerate = 0;
    int n_failed = 0;
};

namespace detail {

/// Runs fn(0..n_tasks-1) on `threads` workers over an atomic task counter.
/// Tasks must be independent; the first non-library exception is rethrown
/// after all workers join.
inline void parallel_for(size_t n_tasks, int threads, const std::function<void(size_t)>& fn) {
    if (threads < 1) threads = 1;
    if (threads == 1 || n_tasks <= 1) {
        for (size_t i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr first_error = nullptr;
    std::mutex err_mutex;
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n_tasks) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    size_t n_workers = std::min<size_t>(threads, n_tasks);
    pool.reserve(n_workers);
    for (size_t t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct ReplicaOutcome {
    enum class Status { ok, degenerate, failed };
    Status status = Status::failed;
    double rhat = std::numeric_limits<double>::quiet_NaN();
};

inline std::uint64_t pack_stream(std::uint64_t cell, std::uint64_t replica) {
    return (cell << 32) | replica;
}

/// One paired controlled/uncontrolled replica. The draw order from the
/// replica stream is fixed: network, selection, omegas, initial phases.
inline ReplicaOutcome run_replica(const ExperimentPlan& plan, const FixedNetwork* fixed,
                                  int m_or_k, double c, RngStream& rng) {
    const DynamicsParams& dyn = plan.dyn;
    ReplicaOutcome out;
    try {
        Graph graph;
        NodeSet core;
        std::optional<CentralityScores> local_scores;
        const CentralityScores* scores = nullptr;

        if (fixed) {
            graph = fixed->graph;
            core = fixed->core;
            if (fixed->scores) scores = &*fixed->scores;
        } else {
            switch (plan.network.kind) {
                case NetworkSource::Kind::scale_free:
                    graph = gen_scale_free(plan.network.gamma, plan.network.lcc_lo,
                                           plan.network.lcc_hi, rng, plan.network.sf_opts);
                    break;
                case NetworkSource::Kind::core_periphery: {
                    auto cp = gen_core_periphery(plan.network.n_core, plan.network.n,
                                                 plan.network.p, rng);
                    graph = std::move(cp.graph);
                    core = std::move(cp.core);
                    break;
                }
                case NetworkSource::Kind::watts_strogatz:
                    graph = gen_watts_strogatz(plan.network.n, plan.network.k_mean,
                                               plan.network.p_ws, rng);
                    break;
                case NetworkSource::Kind::ring:
                    graph = gen_regular_ring(plan.network.n, plan.network.k_mean);
                    break;
                case NetworkSource::Kind::star:
                    graph = gen_star(plan.network.n);
                    break;
                case NetworkSource::Kind::edge_list:
                    throw ConfigError("run_replica: edge-list sources must be pre-resolved");
            }
            if (plan.strategy != SelectionStrategy::random) {
                local_scores = strategy_scores(graph, plan.strategy, dyn.alpha);
                scores = &*local_scores;
            }
        }

        int n = graph.num_nodes();
        NodeSet controllers;
        if (plan.core_split_m) {
            controllers = select_core_split(graph, core, m_or_k, *plan.core_split_m,
                                            plan.strategy, rng, scores);
        } else {
            controllers = select_controllers(graph, plan.strategy, m_or_k, rng, scores);
        }

        std::vector<double> omegas(n);
        bool gaps_ok = false;
        for (int attempt = 0; attempt < dyn.omega_max_attempts && !gaps_ok; ++attempt) {
            for (int i = 0; i < n; ++i) omegas[i] = rng.normal(dyn.omega_mean, dyn.omega_std);
            gaps_ok = true;
            for (size_t a = 0; a < controllers.size() && gaps_ok; ++a)
                for (size_t b = a + 1; b < controllers.size(); ++b)
                    if (std::abs(omegas[controllers[a]] - omegas[controllers[b]]) <
                        dyn.freq_gap_min) {
                        gaps_ok = false;
                        break;
                    }
        }
        if (!gaps_ok)
            throw ResonanceError("run_replica: could not draw well-separated frequencies");

        std::vector<double> phases(n);
        for (int i = 0; i < n; ++i) phases[i] = rng.uniform(0.0, kTwoPi);

        OscillatorSystem sys{std::move(phases), std::move(omegas), dyn.coupling,
                             std::move(graph)};
        IntegrateOptions opts{dyn.dt, dyn.t_end, dyn.record_every, false};

        Trajectory unc = integrate(sys, nullptr, opts);
        double r_unc = asymptotic_order(unc, dyn.transient_fraction);
        if (!(r_unc > dyn.baseline_eps)) {
            out.status = ReplicaOutcome::Status::degenerate;
            return out;
        }

        double rhat;
        if (controllers.empty() || c == 0.0) {
            rhat = 1.0; // zero control signal, trajectories coincide
        } else {
            ControlConfig ctl{controllers, c, dyn.neighbor_decay, dyn.freq_gap_min};
            Trajectory con = integrate(sys, &ctl, opts);
            rhat = asymptotic_order(con, dyn.transient_fraction) / r_unc;
        }
        out.status = ReplicaOutcome::Status::ok;
        out.rhat = rhat;
    } catch (const Error&) {
        out.status = ReplicaOutcome::Status::failed;
    }
    return out;
}

inline CellStats aggregate(std::span<const ReplicaOutcome> outcomes) {
    CellStats cs;
    double sum = 0.0;
    for (const auto& o : outcomes) {
        switch (o.status) {
            case ReplicaOutcome::Status::ok:
                sum += o.rhat;
                ++cs.n_valid;
                break;
            case ReplicaOutcome::Status::degenerate: ++cs.n_degenerate; break;
            case ReplicaOutcome::Status::failed: ++cs.n_failed; break;
        }
    }
    if (cs.n_valid == 0) return cs;
    cs.mean = sum / cs.n_valid;
    double ss = 0.0;
    for (const auto& o : outcomes)
        if (o.status == ReplicaOutcome::Status::ok) {
            double d = o.rhat - cs.mean;
            ss += d * d;
        }
    cs.stddev = cs.n_valid >= 2 ? std::sqrt(ss / (cs.n_valid - 1)) : 0.0;
    return cs;
}

inline SweepResult run_grid(const ExperimentPlan& plan, const FixedNetwork* fixed,
                            const std::vector<int>& row_axis, int threads) {
    size_t n_cells = row_axis.size() * plan.c_axis.size();
    size_t n_tasks = n_cells * static_cast<size_t>(plan.replicas);
    std::vector<ReplicaOutcome> slots(n_tasks);

    parallel_for(n_tasks, threads, [&](size_t task) {
        size_t cell = task / plan.replicas;
        size_t rep = task % plan.replicas;
        size_t im = cell / plan.c_axis.size();
        size_t ic = cell % plan.c_axis.size();
        RngStream rng(plan.seed, pack_stream(cell, rep));
        slots[task] = run_replica(plan, fixed, row_axis[im], plan.c_axis[ic], rng);
    });

    SweepResult res;
    res.m_axis = row_axis;
    res.c_axis = plan.c_axis;
    res.replicas = plan.replicas;
    res.threshold = plan.threshold;
    res.mean_rhat.resize(n_cells);
    res.std_rhat.resize(n_cells);
    res.n_valid.resize(n_cells);
    for (size_t cell = 0; cell < n_cells; ++cell) {
        CellStats cs = aggregate(
            {slots.data() + cell * plan.replicas, static_cast<size_t>(plan.replicas)});
        res.mean_rhat[cell] = cs.mean;
        res.std_rhat[cell] = cs.stddev;
        res.n_valid[cell] = cs.n_valid;
    }
    return res;
}

} // namespace detail

/// Mean/std normalized order for one (m, c) cell.
inline CellStats run_cell(const ExperimentPlan& plan, const FixedNetwork* fixed, int m, double c,
                          std::uint64_t cell_index = 0) {
    std::vector<detail::ReplicaOutcome> outcomes(plan.replicas);
    for (int rep = 0; rep < plan.replicas; ++rep) {
        RngStream rng(plan.seed, detail::pack_stream(cell_index, rep));
        outcomes[rep] = detail::run_replica(plan, fixed, m, c, rng);
    }
    auto cs = detail::aggregate(outcomes);
    if (cs.n_valid == 0)
        throw NumericalError("run_cell: no valid replica (all degenerate or failed)");
    return cs;
}

/// Full (m, c) synchronization map. Replica streams are derived from
/// (seed, cell index, replica index), so the result is independent of the
/// worker count and execution order.
inline SweepResult run_sweep(const ExperimentPlan& plan, int threads = 1,
                             const FixedNetwork* fixed = nullptr) {
    validate_plan(plan);
    if (plan.core_split_m) throw ConfigError("run_sweep: plan has a core-split axis");
    return detail::run_grid(plan, fixed, plan.m_axis, threads);
}

/// (k, c) map over the number of controllers placed in the core, k = 0..M.
inline SweepResult run_core_split_sweep(const ExperimentPlan& plan, int threads = 1,
                                        const FixedNetwork* fixed = nullptr) {
    validate_plan(plan);
    if (!plan.core_split_m) throw ConfigError("run_core_split_sweep: no core-split axis");
    std::vector<int> k_axis(*plan.core_split_m + 1);
    for (int k = 0; k <= *plan.core_split_m; ++k) k_axis[k] = k;
    return detail::run_grid(plan, fixed, k_axis, threads);
}

struct GammaScanPoint {
    double gamma = 0.0;
    SelectionStrategy strategy = SelectionStrategy::degree;
    double delta_mean = 0.0;
    double delta_std = 0.0;
    int networks = 0;
};

struct GammaScanResult {
    std::vector<GammaScanPoint> points; // gamma-major, then strategy
};

/// Per-gamma distribution of the desynchronized-region fraction. Each network
/// realization is generated once and shared across strategies (paired
/// comparison); the (m, c) sweep runs on that fixed network.
inline GammaScanResult run_gamma_scan(const ExperimentPlan& base,
                                      const std::vector<double>& gammas,
                                      const std::vector<SelectionStrategy>& strategies,
                                      int networks, int threads = 1) {
    if (gammas.empty() || strategies.empty() || networks < 1)
        throw ConfigError("run_gamma_scan: empty axes");
    ExperimentPlan proto = base;
    proto.core_split_m.reset();
    validate_plan(proto);

    size_t n_jobs = gammas.size() * static_cast<size_t>(networks);
    std::vector<std::vector<double>> deltas(n_jobs); // per job: delta per strategy

    detail::parallel_for(n_jobs, threads, [&](size_t job) {
        size_t gi = job / networks;
        size_t ri = job % networks;
        RngStream gen_rng(base.seed, RngStream::derive(base.seed, {0x67u, gi, ri}));
        NetworkSource src = base.network;
        src.gamma = gammas[gi];
        FixedNetwork fixed;
        fixed.graph = gen_scale_free(src.gamma, src.lcc_lo, src.lcc_hi, gen_rng, src.sf_opts);
        deltas[job].resize(strategies.size());
        for (size_t si = 0; si < strategies.size(); ++si) {
            ExperimentPlan inner = base;
            inner.core_split_m.reset();
            inner.strategy = strategies[si];
            inner.seed = RngStream::derive(base.seed, {0x73u, gi, ri});
            fixed.scores = precompute_scores(fixed.graph, strategies[si], base.dyn.alpha);
            SweepResult sw = detail::run_grid(inner, &fixed, inner.m_axis, 1);
            deltas[job][si] = delta_fraction(sw, inner.threshold);
        }
    });

    GammaScanResult out;
    for (size_t gi = 0; gi < gammas.size(); ++gi) {
        for (size_t si = 0; si < strategies.size(); ++si) {
            double sum = 0.0;
            for (int ri = 0; ri < networks; ++ri) sum += deltas[gi * networks + ri][si];
            double mean = sum / networks;
            double ss = 0.0;
            for (int ri = 0; ri < networks; ++ri) {
                double d = deltas[gi * networks + ri][si] - mean;
                ss += d * d;
            }
            double sd = networks >= 2 ? std::sqrt(ss / (networks - 1)) : 0.0;
            out.points.push_back({gammas[gi], strategies[si], mean, sd, networks});
        }
    }
    return out;
}

struct PScanPoint {
    double p = 0.0;
    int k = 0;
    int networks = 0;
    double delta_mean = 0.0, delta_std = 0.0;
    double delta_min = 0.0, delta_q25 = 0.0, delta_median = 0.0, delta_q75 = 0.0, delta_max = 0.0;
};

struct PScanResult {
    std::vector<PScanPoint> points; // p-major, then k = 0..M
};

/// For each attachment probability p: generate core-periphery realizations,
/// run the (k, c) core-split sweep on each, and report the distribution of
/// the per-k desynchronized fraction (over the c axis) across realizations.
inline PScanResult run_p_scan(const ExperimentPlan& base, const std::vector<double>& ps,
                              int networks, int threads = 1) {
    if (!base.core_split_m) throw ConfigError("run_p_scan: plan needs a core-split axis");
    if (base.network.kind != NetworkSource::Kind::core_periphery)
        throw ConfigError("run_p_scan: plan needs a core-periphery source");
    if (ps.empty() || networks < 1) throw ConfigError("run_p_scan: empty axes");
    validate_plan(base);

    int M = *base.core_split_m;
    size_t n_jobs = ps.size() * static_cast<size_t>(networks);
    std::vector<std::vector<double>> deltas(n_jobs); // per job: delta per k

    detail::parallel_for(n_jobs, threads, [&](size_t job) {
        size_t pi = job / networks;
        size_t ri = job % networks;
        RngStream gen_rng(base.seed, RngStream::derive(base.seed, {0x70u, pi, ri}));
        auto cp = gen_core_periphery(base.network.n_core, base.network.n, ps[pi], gen_rng);
        FixedNetwork fixed;
        fixed.graph = std::move(cp.graph);
        fixed.core = std::move(cp.core);
        fixed.has_core = true;
        fixed.scores = precompute_scores(fixed.graph, base.strategy, base.dyn.alpha);

        ExperimentPlan inner = base;
        inner.network.p = ps[pi];
        inner.seed = RngStream::derive(base.seed, {0x71u, pi, ri});
        SweepResult sw = run_core_split_sweep(inner, 1, &fixed);

        deltas[job].resize(M + 1);
        for (int k = 0; k <= M; ++k) {
            long hit = 0;
            for (size_t ic = 0; ic < sw.c_axis.size(); ++ic)
                if (sw.mean_rhat[sw.index(k, ic)] <= inner.threshold) ++hit;
            deltas[job][k] = static_cast<double>(hit) / static_cast<double>(sw.c_axis.size());
        }
    });

    auto quantile = [](std::vector<double> v, double q) {
        std::sort(v.begin(), v.end());
        double pos = q * (v.size() - 1);
        size_t lo = static_cast<size_t>(pos);
        size_t hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - lo) * (v[hi] - v[lo]);
    };

    PScanResult out;
    for (size_t pi = 0; pi < ps.size(); ++pi) {
        for (int k = 0; k <= M; ++k) {
            std::vector<double> vals(networks);
            for (int ri = 0; ri < networks; ++ri) vals[ri] = deltas[pi * networks + ri][k];
            double mean = 0.0;
            for (double v : vals) mean += v;
            mean /= networks;
            double ss = 0.0;
            for (double v : vals) ss += (v - mean) * (v - mean);
            double sd = networks >= 2 ? std::sqrt(ss / (networks - 1)) : 0.0;
            PScanPoint pt;
            pt.p = ps[pi];
            pt.k = k;
            pt.networks = networks;
            pt.delta_mean = mean;
            pt.delta_std = sd;
            pt.delta_min = quantile(vals, 0.0);
            pt.delta_q25 = quantile(vals, 0.25);
            pt.delta_median = quantile(vals, 0.5);
            pt.delta_q75 = quantile(vals, 0.75);
            pt.delta_max = quantile(vals, 1.0);
            out.points.push_back(pt);
        }
    }
    return out;
}

} // namespace desync
