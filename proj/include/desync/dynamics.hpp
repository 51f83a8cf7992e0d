#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "desync/error.hpp"
#include "desync/graph.hpp"

namespace desync {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Phase-oscillator state: dphi_k/dt = omega_k + (K/N) sum_j A_kj sin(phi_j - phi_k).
struct OscillatorSystem {
    std::vector<double> phases; // radians
    std::vector<double> omegas; // natural frequencies
    double coupling = 1.0;      // K
    Graph graph;
};

/// Pinning-control parameters. Controllers receive
///   h_k = -(c K^2 / 4) R Rt_k cos(psi - phi_k)
/// and their first neighbors an attenuated copy (neighbor_decay per hop-1
/// controller, nothing beyond distance 1).
struct ControlConfig {
    NodeSet controllers;
    double strength = 0.0;                     // c
    double neighbor_decay = 0.13533528323661270; // exp(-2)
    double freq_gap_min = 1e-3;
};

struct OrderParameter {
    double R = 0.0;
    double psi = 0.0;
};

/// Modulus/argument of the mean unit phasor.
inline OrderParameter order_parameter(std::span<const double> phases) {
    if (phases.empty()) throw std::invalid_argument("order_parameter: empty phase vector");
    double sr = 0.0, si = 0.0;
    for (double p : phases) {
        sr += std::cos(p);
        si += std::sin(p);
    }
    sr /= static_cast<double>(phases.size());
    si /= static_cast<double>(phases.size());
    return {std::hypot(sr, si), std::atan2(si, sr)};
}

struct TildeOrder {
    double R = 0.0;
    double psi = 0.0;
};

/// Frequency-weighted partial order parameter seen by each controller:
///   Rt_k e^{i pst_k} = (1/M) sum_{j in ctl, j != k} e^{i phi_j} / (omega_j - omega_k).
/// The resonant j = k term is excluded; controller frequency pairs closer
/// than freq_gap_min raise ResonanceError.
inline std::vector<TildeOrder> tilde_order(std::span<const double> phases,
                                           std::span<const double> omegas,
                                           const NodeSet& controllers,
                                           double freq_gap_min = 1e-3) {
    if (controllers.empty()) throw std::invalid_argument("tilde_order: empty controller set");
    size_t m = controllers.size();
    for (size_t a = 0; a < m; ++a)
        for (size_t b = a + 1; b < m; ++b)
            if (std::abs(omegas[controllers[a]] - omegas[controllers[b]]) < freq_gap_min)
                throw ResonanceError("tilde_order: controller frequency gap below minimum");

    std::vector<TildeOrder> out(m);
    for (size_t a = 0; a < m; ++a) {
        int k = controllers[a];
        std::complex<double> acc{0.0, 0.0};
        for (size_t b = 0; b < m; ++b) {
            if (b == a) continue;
            int j = controllers[b];
            acc += std::polar(1.0, phases[j]) / (omegas[j] - omegas[k]);
        }
        acc /= static_cast<double>(m);
        out[a] = {std::abs(acc), std::arg(acc)};
    }
    return out;
}

namespace detail {

/// Evaluator for the controlled right-hand side; precomputes the
/// controller-adjacency structure and owns the trig scratch buffers so a
/// full integration performs no allocation per step.
class Stepper {
public:
    Stepper(const OscillatorSystem& sys, const ControlConfig* ctl)
        : g_(sys.graph), omegas_(sys.omegas), coupling_(sys.coupling), ctl_(ctl) {
        int n = g_.num_nodes();
        if (static_cast<int>(sys.phases.size()) != n ||
            static_cast<int>(sys.omegas.size()) != n)
            throw std::invalid_argument("dynamics: state size does not match graph");
        sin_.resize(n);
        cos_.resize(n);
        if (ctl_ && !ctl_->controllers.empty() && ctl_->strength > 0.0) {
            validate_node_set(g_, ctl_->controllers, "control");
            if (ctl_->strength < 0.0)
                throw std::invalid_argument("control: strength must be >= 0");
            if (!(ctl_->neighbor_decay > 0.0) || ctl_->neighbor_decay > 1.0)
                throw std::invalid_argument("control: neighbor_decay must be in (0,1]");
            size_t m = ctl_->controllers.size();
            for (size_t a = 0; a < m; ++a)
                for (size_t b = a + 1; b < m; ++b)
                    if (std::abs(omegas_[ctl_->controllers[a]] - omegas_[ctl_->controllers[b]]) <
                        ctl_->freq_gap_min)
                        throw ResonanceError("control: controller frequency gap below minimum");
            ctl_slot_.assign(n, -1);
            for (size_t a = 0; a < m; ++a) ctl_slot_[ctl_->controllers[a]] = static_cast<int>(a);
            adj_ctl_.resize(n);
            for (int v = 0; v < n; ++v) {
                if (ctl_slot_[v] >= 0) continue;
                for (int w : g_.neighbors(v))
                    if (ctl_slot_[w] >= 0) adj_ctl_[v].push_back(ctl_slot_[w]);
            }
            h_.resize(m);
            active_ = true;
        }
    }

    /// d(phases)/dt into `out`.
    void eval(std::span<const double> phases, std::span<double> out) {
        int n = g_.num_nodes();
        for (int v = 0; v < n; ++v) {
            sin_[v] = std::sin(phases[v]);
            cos_[v] = std::cos(phases[v]);
        }
        double kn = coupling_ / static_cast<double>(n);
        for (int v = 0; v < n; ++v) {
            double ss = 0.0, sc = 0.0;
            for (int w : g_.neighbors(v)) {
                ss += sin_[w];
                sc += cos_[w];
            }
            out[v] = omegas_[v] + kn * (cos_[v] * ss - sin_[v] * sc);
        }
        if (!active_) return;

        double sr = 0.0, si = 0.0;
        for (int v = 0; v < n; ++v) {
            sr += cos_[v];
            si += sin_[v];
        }
        sr /= n;
        si /= n;
        double R = std::hypot(sr, si);
        double psi = std::atan2(si, sr);

        const auto& ctl = ctl_->controllers;
        size_t m = ctl.size();
        double pref = -ctl_->strength * coupling_ * coupling_ * 0.25 * R;
        for (size_t a = 0; a < m; ++a) {
            int k = ctl[a];
            double ar = 0.0, ai = 0.0;
            for (size_t b = 0; b < m; ++b) {
                if (b == a) continue;
                int j = ctl[b];
                double inv = 1.0 / (omegas_[j] - omegas_[k]);
                ar += cos_[j] * inv;
                ai += sin_[j] * inv;
            }
            double rt = std::hypot(ar, ai) / static_cast<double>(m);
            h_[a] = pref * rt * std::cos(psi - phases[k]);
        }
        for (size_t a = 0; a < m; ++a) out[ctl[a]] += h_[a];
        for (int v = 0; v < n; ++v) {
            if (ctl_slot_[v] >= 0 || adj_ctl_[v].empty()) continue;
            double s = 0.0;
            for (int slot : adj_ctl_[v]) s += h_[slot];
            out[v] += ctl_->neighbor_decay * s;
        }
    }

    bool control_active() const { return active_; }

private:
    const Graph& g_;
    const std::vector<double>& omegas_;
    double coupling_;
    const ControlConfig* ctl_;
    bool active_ = false;
    std::vector<double> sin_, cos_, h_;
    std::vector<int> ctl_slot_;
    std::vector<std::vector<int>> adj_ctl_;
};

} // namespace detail

/// Control signal vector S for the current state: h_k on controllers, the
/// neighbor_decay-attenuated controller sum on their first neighbors, zero
/// elsewhere.
inline std::vector<double> control_signal(const OscillatorSystem& sys, const ControlConfig& ctl) {
    std::vector<double> s(sys.phases.size(), 0.0);
    if (ctl.controllers.empty() || ctl.strength == 0.0) return s;
    detail::Stepper base(sys, nullptr), full(sys, &ctl);
    std::vector<double> d0(s.size()), d1(s.size());
    base.eval(sys.phases, d0);
    full.eval(sys.phases, d1);
    for (size_t i = 0; i < s.size(); ++i) s[i] = d1[i] - d0[i];
    return s;
}

/// Phase derivative of the (optionally controlled) system.
inline std::vector<double> rhs(const OscillatorSystem& sys, const ControlConfig* ctl = nullptr) {
    detail::Stepper st(sys, ctl);
    std::vector<double> out(sys.phases.size());
    st.eval(sys.phases, out);
    return out;
}

struct Trajectory {
    std::vector<double> times;
    std::vector<double> R_series;
    std::vector<double> final_phases;                 // wrapped to [0, 2pi)
    std::vector<std::vector<double>> phase_snapshots; // only when requested
};

struct IntegrateOptions {
    double dt = 0.05;
    double t_end = 200.0;
    int record_every = 1;
    bool record_phases = false;
};

inline double wrap_angle(double phi) {
    double w = std::fmod(phi, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w;
}

/// Classical fixed-step 4th-order Runge-Kutta evolution; R(t) recorded at
/// t = 0 and every record_every steps. Phases are kept unwrapped during
/// integration and wrapped only on output.
inline Trajectory integrate(const OscillatorSystem& sys, const ControlConfig* ctl,
                            const IntegrateOptions& opts = {}) {
    if (!(opts.dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
    if (!(opts.t_end > 0.0)) throw std::invalid_argument("integrate: t_end must be > 0");
    if (opts.record_every < 1) throw std::invalid_argument("integrate: record_every must be >= 1");

    detail::Stepper st(sys, ctl);
    long n_steps = std::lround(opts.t_end / opts.dt);
    if (n_steps < 1) n_steps = 1;
    size_t n = sys.phases.size();

    std::vector<double> y = sys.phases;
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);

    Trajectory traj;
    traj.times.reserve(n_steps / opts.record_every + 2);
    traj.R_series.reserve(n_steps / opts.record_every + 2);

    auto record = [&](long step) {
        double R = order_parameter(y).R;
        if (!std::isfinite(R))
            throw IntegrationError("integrate: non-finite state", step);
        traj.times.push_back(static_cast<double>(step) * opts.dt);
        traj.R_series.push_back(R);
        if (opts.record_phases) {
            std::vector<double> snap(n);
            for (size_t i = 0; i < n; ++i) snap[i] = wrap_angle(y[i]);
            traj.phase_snapshots.push_back(std::move(snap));
        }
    };

    record(0);
    for (long step = 1; step <= n_steps; ++step) {
        st.eval(y, k1);
        for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * opts.dt * k1[i];
        st.eval(tmp, k2);
        for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * opts.dt * k2[i];
        st.eval(tmp, k3);
        for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + opts.dt * k3[i];
        st.eval(tmp, k4);
        for (size_t i = 0; i < n; ++i)
            y[i] += opts.dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (step % opts.record_every == 0) record(step);
    }

    traj.final_phases.resize(n);
    for (size_t i = 0; i < n; ++i) traj.final_phases[i] = wrap_angle(y[i]);
    return traj;
}

struct FullControlTerms {
    std::vector<double> term1, term2, term3; // bracketed terms, per node
    std::vector<double> h;                   // -(K^2/4)(term1 - term2 - term3)
};

/// Reference (unsimplified) control term. The partial order parameter here
/// runs over all N nodes,
///   Rt_k e^{i pst_k} = (1/N) sum_{j != k} e^{i phi_j} / (omega_j - omega_k),
/// so every pairwise frequency gap must clear freq_gap_min.
inline FullControlTerms full_control_terms(std::span<const double> phases,
                                           std::span<const double> omegas, double coupling,
                                           double freq_gap_min = 1e-3) {
    size_t n = phases.size();
    if (n == 0 || omegas.size() != n)
        throw std::invalid_argument("full_control_terms: bad state sizes");
    for (size_t a = 0; a < n; ++a)
        for (size_t b = a + 1; b < n; ++b)
            if (std::abs(omegas[a] - omegas[b]) < freq_gap_min)
                throw ResonanceError("full_control_terms: frequency gap below minimum");

    auto op = order_parameter(phases);
    std::vector<double> rt(n), pst(n);
    for (size_t k = 0; k < n; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (size_t j = 0; j < n; ++j) {
            if (j == k) continue;
            acc += std::polar(1.0, phases[j]) / (omegas[j] - omegas[k]);
        }
        acc /= static_cast<double>(n);
        rt[k] = std::abs(acc);
        pst[k] = std::arg(acc);
    }

    FullControlTerms out;
    out.term1.resize(n);
    out.term2.resize(n);
    out.term3.resize(n);
    out.h.resize(n);
    for (size_t k = 0; k < n; ++k) {
        out.term1[k] = op.R * rt[k] * std::cos(op.psi - pst[k]);
        double t2 = 0.0;
        for (size_t l = 0; l < n; ++l)
            t2 += std::cos(phases[l] - phases[k]) * std::cos(pst[l] - phases[l]) * rt[l];
        out.term2[k] = t2 / static_cast<double>(n);
        double t3 = 0.0;
        for (size_t l = 0; l < n; ++l) {
            if (l == k) continue;
            t3 += std::sin(phases[k] - phases[l]) / (omegas[k] - omegas[l]) *
                  std::sin(op.psi - phases[l]) * op.R;
        }
        out.term3[k] = t3;
        out.h[k] = -coupling * coupling * 0.25 * (out.term1[k] - out.term2[k] - out.term3[k]);
    }
    return out;
}

inline std::vector<double> full_control_reference(std::span<const double> phases,
                                                  std::span<const double> omegas, double coupling,
                                                  double freq_gap_min = 1e-3) {
    return full_control_terms(phases, omegas, coupling, freq_gap_min).h;
}

} // namespace desync
