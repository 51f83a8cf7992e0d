#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "desync/error.hpp"
#include "desync/experiment.hpp"
#include "desync/graph.hpp"
#include "desync/metrics.hpp"
#include "desync/version.hpp"

namespace desync::io {

using json = nlohmann::json;

/// Fixed 10-significant-digit formatting, '.' decimal separator; the one
/// number format used in every emitted file so outputs are bit-stable.
inline std::string fmt_g10(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// edge lists

struct ParsedGraph {
    Graph graph;
    std::vector<std::string> labels; // labels[i] = label of node index i
};

/// Whitespace-separated "u v [w]" lines; '#' starts a comment. Weights are
/// discarded and directed duplicates collapse (an edge exists if either
/// direction is present). String labels map to dense indices in first-seen
/// order; if all labels are the integers 0..n-1 they are taken verbatim, so
/// files written by write_edge_list parse back to the identical graph.
inline ParsedGraph parse_edge_list(std::istream& in, const std::string& name = "<stream>") {
    std::vector<std::pair<std::string, std::string>> raw;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string u, v, w, extra;
        if (!(ls >> u)) continue; // blank
        if (!(ls >> v))
            throw IoError(name + ":" + std::to_string(line_no) + ": expected two node labels");
        if (ls >> w && ls >> extra)
            throw IoError(name + ":" + std::to_string(line_no) + ": too many fields");
        raw.emplace_back(std::move(u), std::move(v));
    }
    if (raw.empty()) throw IoError(name + ": no edges found");

    std::map<std::string, int> index;
    std::vector<std::string> labels;
    auto intern = [&](const std::string& s) {
        auto [it, inserted] = index.emplace(s, static_cast<int>(labels.size()));
        if (inserted) labels.push_back(s);
        return it->second;
    };
    std::vector<std::pair<int, int>> edges;
    edges.reserve(raw.size());
    for (auto& [u, v] : raw) edges.emplace_back(intern(u), intern(v));

    // Dense 0-based numeric label sets keep their numeric identity.
    bool numeric = true;
    for (const auto& s : labels) {
        if (s.empty() || (s.size() > 1 && s[0] == '0')) {
            numeric = false;
            break;
        }
        for (char ch : s)
            if (!std::isdigit(static_cast<unsigned char>(ch))) {
                numeric = false;
                break;
            }
        if (!numeric) break;
    }
    if (numeric) {
        long n = static_cast<long>(labels.size());
        std::vector<bool> seen(n, false);
        for (const auto& s : labels) {
            long v = std::stol(s);
            if (v < 0 || v >= n) {
                numeric = false;
                break;
            }
            seen[v] = true;
        }
        if (numeric)
            for (bool b : seen) numeric = numeric && b;
    }
    if (numeric) {
        for (auto& [u, v] : edges) {
            u = std::stoi(labels[u]);
            v = std::stoi(labels[v]);
        }
        std::vector<std::string> ordered(labels.size());
        for (size_t i = 0; i < labels.size(); ++i) ordered[i] = std::to_string(i);
        labels = std::move(ordered);
    }
    return {Graph::from_edges(static_cast<int>(labels.size()), edges), std::move(labels)};
}

inline ParsedGraph parse_edge_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open edge list: " + path.string());
    return parse_edge_list(in, path.string());
}

inline void write_edge_list(std::ostream& out, const Graph& g,
                            const std::vector<std::string>* labels = nullptr) {
    for (auto [u, v] : g.edges()) {
        if (labels)
            out << (*labels)[u] << ' ' << (*labels)[v] << '\n';
        else
            out << u << ' ' << v << '\n';
    }
}

inline void write_edge_list(const std::filesystem::path& path, const Graph& g,
                            const std::vector<std::string>* labels = nullptr) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write edge list: " + path.string());
    write_edge_list(out, g, labels);
}

// ---------------------------------------------------------------------------
// CSV results

inline void write_sweep_csv(std::ostream& out, const SweepResult& res,
                            const std::string& row_name = "m") {
    out << row_name << ",c,mean_rhat,std_rhat,n_valid_replicas\n";
    for (size_t im = 0; im < res.m_axis.size(); ++im)
        for (size_t ic = 0; ic < res.c_axis.size(); ++ic) {
            size_t i = res.index(im, ic);
            out << res.m_axis[im] << ',' << fmt_g10(res.c_axis[ic]) << ','
                << fmt_g10(res.mean_rhat[i]) << ',' << fmt_g10(res.std_rhat[i]) << ','
                << res.n_valid[i] << '\n';
        }
}

inline void write_sweep_csv(const std::filesystem::path& path, const SweepResult& res,
                            const std::string& row_name = "m") {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write result: " + path.string());
    write_sweep_csv(out, res, row_name);
}

inline SweepResult read_sweep_csv(std::istream& in, const std::string& name = "<stream>",
                                  std::string* row_name_out = nullptr) {
    std::string header;
    if (!std::getline(in, header)) throw IoError(name + ": empty result file");
    auto comma = header.find(',');
    if (comma == std::string::npos) throw IoError(name + ": malformed header");
    if (row_name_out) *row_name_out = header.substr(0, comma);

    SweepResult res;
    std::vector<int> ms;
    std::vector<double> cs, mean, sd;
    std::vector<int> nv;
    std::string line;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        auto next = [&]() {
            if (!std::getline(ls, tok, ','))
                throw IoError(name + ":" + std::to_string(line_no) + ": short row");
            return tok;
        };
        ms.push_back(std::stoi(next()));
        cs.push_back(std::strtod(next().c_str(), nullptr));
        mean.push_back(std::strtod(next().c_str(), nullptr));
        sd.push_back(std::strtod(next().c_str(), nullptr));
        nv.push_back(std::stoi(next()));
    }
    if (ms.empty()) throw IoError(name + ": no data rows");

    for (int m : ms)
        if (res.m_axis.empty() || m != res.m_axis.back()) res.m_axis.push_back(m);
    size_t n_c = ms.size() / res.m_axis.size();
    if (res.m_axis.size() * n_c != ms.size())
        throw IoError(name + ": ragged sweep grid");
    res.c_axis.assign(cs.begin(), cs.begin() + n_c);
    res.mean_rhat = std::move(mean);
    res.std_rhat = std::move(sd);
    res.n_valid = std::move(nv);
    for (int v : res.n_valid) res.replicas = std::max(res.replicas, v);
    return res;
}

inline SweepResult read_sweep_csv(const std::filesystem::path& path,
                                  std::string* row_name_out = nullptr) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open result: " + path.string());
    return read_sweep_csv(in, path.string(), row_name_out);
}

inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,R\n";
    for (size_t i = 0; i < traj.times.size(); ++i)
        out << fmt_g10(traj.times[i]) << ',' << fmt_g10(traj.R_series[i]) << '\n';
}

inline void write_scores_csv(std::ostream& out, const CentralityScores& scores) {
    out << "node,score\n";
    for (size_t i = 0; i < scores.values.size(); ++i)
        out << i << ',' << fmt_g10(scores.values[i]) << '\n';
}

inline void write_gamma_scan_csv(std::ostream& out, const GammaScanResult& res) {
    out << "gamma,strategy,n_networks,delta_mean,delta_std\n";
    for (const auto& p : res.points)
        out << fmt_g10(p.gamma) << ',' << to_string(p.strategy) << ',' << p.networks << ','
            << fmt_g10(p.delta_mean) << ',' << fmt_g10(p.delta_std) << '\n';
}

inline void write_p_scan_csv(std::ostream& out, const PScanResult& res) {
    out << "p,k,n_networks,delta_mean,delta_std,delta_min,delta_q25,delta_median,delta_q75,"
           "delta_max\n";
    for (const auto& pt : res.points)
        out << fmt_g10(pt.p) << ',' << pt.k << ',' << pt.networks << ',' << fmt_g10(pt.delta_mean)
            << ',' << fmt_g10(pt.delta_std) << ',' << fmt_g10(pt.delta_min) << ','
            << fmt_g10(pt.delta_q25) << ',' << fmt_g10(pt.delta_median) << ','
            << fmt_g10(pt.delta_q75) << ',' << fmt_g10(pt.delta_max) << '\n';
}

// ---------------------------------------------------------------------------
// plan (de)serialization

inline json network_to_json(const NetworkSource& src) {
    json j;
    switch (src.kind) {
        case NetworkSource::Kind::scale_free:
            j["kind"] = "scale_free";
            j["gamma"] = src.gamma;
            j["lcc_window"] = {src.lcc_lo, src.lcc_hi};
            j["k_min"] = src.sf_opts.k_min;
            j["max_attempts"] = src.sf_opts.max_attempts;
            break;
        case NetworkSource::Kind::core_periphery:
            j["kind"] = "core_periphery";
            j["n_core"] = src.n_core;
            j["n_total"] = src.n;
            j["p"] = src.p;
            break;
        case NetworkSource::Kind::watts_strogatz:
            j["kind"] = "watts_strogatz";
            j["n"] = src.n;
            j["k_mean"] = src.k_mean;
            j["p_ws"] = src.p_ws;
            break;
        case NetworkSource::Kind::ring:
            j["kind"] = "ring";
            j["n"] = src.n;
            j["k"] = src.k_mean;
            break;
        case NetworkSource::Kind::star:
            j["kind"] = "star";
            j["n"] = src.n;
            break;
        case NetworkSource::Kind::edge_list:
            j["kind"] = "edge_list";
            j["path"] = src.path;
            if (src.reshuffle_swaps == -1)
                j["reshuffle_swaps"] = "L/2";
            else
                j["reshuffle_swaps"] = src.reshuffle_swaps;
            break;
    }
    return j;
}

inline NetworkSource network_from_json(const json& j) {
    NetworkSource src;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "scale_free") {
        src.kind = NetworkSource::Kind::scale_free;
        src.gamma = j.value("gamma", -3.0);
        if (j.contains("lcc_window")) {
            src.lcc_lo = j["lcc_window"].at(0).get<int>();
            src.lcc_hi = j["lcc_window"].at(1).get<int>();
        }
        src.sf_opts.k_min = j.value("k_min", src.sf_opts.k_min);
        src.sf_opts.max_attempts = j.value("max_attempts", src.sf_opts.max_attempts);
    } else if (kind == "core_periphery") {
        src.kind = NetworkSource::Kind::core_periphery;
        src.n_core = j.value("n_core", 10);
        src.n = j.value("n_total", 100);
        src.p = j.value("p", 0.7);
    } else if (kind == "watts_strogatz") {
        src.kind = NetworkSource::Kind::watts_strogatz;
        src.n = j.value("n", 100);
        src.k_mean = j.value("k_mean", 10);
        src.p_ws = j.value("p_ws", 0.1);
    } else if (kind == "ring") {
        src.kind = NetworkSource::Kind::ring;
        src.n = j.value("n", 50);
        src.k_mean = j.value("k", 6);
    } else if (kind == "star") {
        src.kind = NetworkSource::Kind::star;
        src.n = j.value("n", 10);
    } else if (kind == "edge_list") {
        src.kind = NetworkSource::Kind::edge_list;
        src.path = j.at("path").get<std::string>();
        if (j.contains("reshuffle_swaps")) {
            const auto& rs = j["reshuffle_swaps"];
            if (rs.is_string()) {
                if (rs.get<std::string>() != "L/2")
                    throw ConfigError("network: reshuffle_swaps must be an integer or \"L/2\"");
                src.reshuffle_swaps = -1;
            } else {
                src.reshuffle_swaps = rs.get<long>();
            }
        }
    } else {
        throw ConfigError("network: unknown kind '" + kind + "'");
    }
    return src;
}

inline std::vector<int> int_axis_from_json(const json& j) {
    std::vector<int> axis;
    if (j.is_array()) {
        for (const auto& v : j) axis.push_back(v.get<int>());
    } else {
        int from = j.at("from").get<int>();
        int to = j.at("to").get<int>();
        int step = j.value("step", 1);
        if (step < 1) throw ConfigError("axis: step must be >= 1");
        for (int m = from; m <= to; m += step) axis.push_back(m);
    }
    if (axis.empty()) throw ConfigError("axis: empty");
    return axis;
}

inline std::vector<double> real_axis_from_json(const json& j) {
    std::vector<double> axis;
    if (j.is_array()) {
        for (const auto& v : j) axis.push_back(v.get<double>());
    } else {
        double from = j.at("from").get<double>();
        double to = j.at("to").get<double>();
        int count = j.at("count").get<int>();
        if (count < 1) throw ConfigError("axis: count must be >= 1");
        for (int i = 0; i < count; ++i)
            axis.push_back(count == 1 ? from : from + (to - from) * i / (count - 1));
    }
    if (axis.empty()) throw ConfigError("axis: empty");
    return axis;
}

inline json plan_to_json(const ExperimentPlan& plan) {
    json j;
    j["network"] = network_to_json(plan.network);
    j["strategy"] = to_string(plan.strategy);
    j["m_axis"] = plan.m_axis;
    j["c_axis"] = plan.c_axis;
    j["replicas"] = plan.replicas;
    j["seed"] = plan.seed;
    j["threshold"] = plan.threshold;
    const DynamicsParams& d = plan.dyn;
    j["dynamics"] = {{"coupling", d.coupling},
                     {"dt", d.dt},
                     {"t_end", d.t_end},
                     {"transient_fraction", d.transient_fraction},
                     {"record_every", d.record_every},
                     {"omega_mean", d.omega_mean},
                     {"omega_std", d.omega_std},
                     {"freq_gap_min", d.freq_gap_min},
                     {"neighbor_decay", d.neighbor_decay},
                     {"baseline_eps", d.baseline_eps},
                     {"omega_max_attempts", d.omega_max_attempts},
                     {"alpha", d.alpha}};
    if (plan.core_split_m) j["core_split"] = {{"m", *plan.core_split_m}};
    return j;
}

inline ExperimentPlan plan_from_json(const json& j) {
    ExperimentPlan plan;
    if (j.contains("network")) plan.network = network_from_json(j["network"]);
    if (j.contains("strategy"))
        plan.strategy = strategy_from_string(j["strategy"].get<std::string>());
    if (j.contains("m_axis"))
        plan.m_axis = int_axis_from_json(j["m_axis"]);
    else {
        plan.m_axis.resize(30);
        for (int i = 0; i < 30; ++i) plan.m_axis[i] = i + 1;
    }
    if (j.contains("c_axis"))
        plan.c_axis = real_axis_from_json(j["c_axis"]);
    else
        plan.c_axis = real_axis_from_json(json{{"from", 0.05}, {"to", 3.0}, {"count", 30}});
    plan.replicas =
        j.value("replicas", plan.network.kind == NetworkSource::Kind::edge_list ? 50 : 100);
    plan.seed = j.value("seed", std::uint64_t{0});
    plan.threshold = j.value("threshold", 0.15);
    if (j.contains("dynamics")) {
        const json& d = j["dynamics"];
        DynamicsParams& p = plan.dyn;
        p.coupling = d.value("coupling", p.coupling);
        p.dt = d.value("dt", p.dt);
        p.t_end = d.value("t_end", p.t_end);
        p.transient_fraction = d.value("transient_fraction", p.transient_fraction);
        p.record_every = d.value("record_every", p.record_every);
        p.omega_mean = d.value("omega_mean", p.omega_mean);
        p.omega_std = d.value("omega_std", p.omega_std);
        p.freq_gap_min = d.value("freq_gap_min", p.freq_gap_min);
        p.neighbor_decay = d.value("neighbor_decay", p.neighbor_decay);
        p.baseline_eps = d.value("baseline_eps", p.baseline_eps);
        p.omega_max_attempts = d.value("omega_max_attempts", p.omega_max_attempts);
        p.alpha = d.value("alpha", p.alpha);
    }
    if (j.contains("core_split")) plan.core_split_m = j["core_split"].at("m").get<int>();
    return plan;
}

/// Desk-scale knob: multiplies replica counts (and scan network counts at the
/// call sites that use it), never below 1.
inline void apply_scale(ExperimentPlan& plan, double scale) {
    if (!(scale > 0.0)) throw ConfigError("scale must be > 0");
    plan.replicas = std::max(1, static_cast<int>(std::lround(plan.replicas * scale)));
}

inline int scaled_count(int count, double scale) {
    return std::max(1, static_cast<int>(std::lround(count * scale)));
}

struct GammaScanConfig {
    std::vector<double> gammas{-2.0, -2.5, -3.0, -3.5, -4.0};
    std::vector<SelectionStrategy> strategies{SelectionStrategy::random, SelectionStrategy::degree,
                                              SelectionStrategy::functionability};
    int networks = 100;
};

inline GammaScanConfig gamma_scan_from_json(const json& j) {
    GammaScanConfig cfg;
    if (!j.contains("gamma_scan")) return cfg;
    const json& g = j["gamma_scan"];
    if (g.contains("gammas")) cfg.gammas = g["gammas"].get<std::vector<double>>();
    if (g.contains("strategies")) {
        cfg.strategies.clear();
        for (const auto& s : g["strategies"])
            cfg.strategies.push_back(strategy_from_string(s.get<std::string>()));
    }
    cfg.networks = g.value("networks", cfg.networks);
    return cfg;
}

inline json gamma_scan_to_json(const GammaScanConfig& cfg) {
    json j;
    j["gammas"] = cfg.gammas;
    json strat = json::array();
    for (auto s : cfg.strategies) strat.push_back(to_string(s));
    j["strategies"] = strat;
    j["networks"] = cfg.networks;
    return j;
}

struct PScanConfig {
    std::vector<double> ps{0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    int networks = 100;
};

inline PScanConfig p_scan_from_json(const json& j) {
    PScanConfig cfg;
    if (!j.contains("p_scan")) return cfg;
    const json& g = j["p_scan"];
    if (g.contains("ps")) cfg.ps = g["ps"].get<std::vector<double>>();
    cfg.networks = g.value("networks", cfg.networks);
    return cfg;
}

inline json p_scan_to_json(const PScanConfig& cfg) {
    json j;
    j["ps"] = cfg.ps;
    j["networks"] = cfg.networks;
    return j;
}

// ---------------------------------------------------------------------------
// sidecar

/// Writes "<base>.json" next to "<base>.csv": the resolved plan plus enough
/// metadata to replay the run and reproduce the CSV byte for byte.
inline void write_sidecar(const std::filesystem::path& csv_path, const std::string& command,
                          const json& plan_json, const json* scan_json = nullptr,
                          int threads = 1) {
    json j;
    j["schema"] = "desync-result/1";
    j["version"] = kVersion;
    j["command"] = command;
    j["threads"] = threads;
    j["plan"] = plan_json;
    if (scan_json) j["scan"] = *scan_json;
    std::filesystem::path p = csv_path;
    p.replace_extension(".json");
    std::ofstream out(p);
    if (!out) throw IoError("cannot write sidecar: " + p.string());
    out << j.dump(2) << '\n';
}

inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return j;
}

/// Resolves an edge-list network source: parse, optionally reshuffle (swap
/// count -1 means half the ingested edge count), and precompute the strategy
/// scores once. Synthetic sources return nullopt (they are drawn per replica).
inline std::optional<FixedNetwork> resolve_network(const ExperimentPlan& plan) {
    if (plan.network.kind != NetworkSource::Kind::edge_list) return std::nullopt;
    FixedNetwork fixed;
    fixed.graph = parse_edge_list(plan.network.path).graph;
    long swaps = plan.network.reshuffle_swaps;
    if (swaps == -1) swaps = fixed.graph.num_edges() / 2;
    if (swaps > 0) {
        RngStream rng(plan.seed, detail::pack_stream(0xFFFFFFFFull, 0));
        fixed.graph = criss_cross_reshuffle(fixed.graph, static_cast<int>(swaps), rng);
    }
    fixed.scores = precompute_scores(fixed.graph, plan.strategy, plan.dyn.alpha);
    return fixed;
}

} // namespace desync::io
