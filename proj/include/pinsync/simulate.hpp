#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "pinsync/analysis.hpp"

namespace pinsync {

/// Starting node states and reference state.
struct InitialCondition {
    std::vector<std::vector<double>> node_states; ///< N vectors of dimension n
    std::vector<double> reference;                ///< c(0), dimension n

    void validate(int node_count, std::size_t state_dim) const {
        if (node_states.size() != static_cast<std::size_t>(node_count))
            throw validation_error("init.node_states: expected " + std::to_string(node_count) +
                                   " node states, got " + std::to_string(node_states.size()));
        for (std::size_t i = 0; i < node_states.size(); ++i)
            if (node_states[i].size() != state_dim)
                throw validation_error("init.node_states[" + std::to_string(i + 1) +
                                       "]: expected dimension " + std::to_string(state_dim));
        if (reference.size() != state_dim)
            throw validation_error("init.reference: expected dimension " +
                                   std::to_string(state_dim));
    }

    /// Stacked error vector e(0) = x(0) - 1 (x) c(0).
    std::vector<double> stacked_error() const {
        std::vector<double> e;
        for (const auto& x : node_states)
            for (std::size_t k = 0; k < x.size(); ++k) e.push_back(x[k] - reference[k]);
        return e;
    }
};

/// Sampled trajectory of a propagation run.
struct SimulationTrace {
    std::vector<double> times;
    std::vector<double> error_norms;
    std::vector<std::vector<std::vector<double>>> node_states; ///< per sample, per node
    std::vector<std::vector<double>> reference;                ///< per sample c(t)
    bool overflow = false;
};

namespace detail {

/// Magnitude at which a diverging trace is truncated instead of erroring.
constexpr double kOverflowLimit = 1e150;

/// Sorted sample instants: multiples of sample_dt, every switching instant,
/// and t_end, deduplicated.
inline std::vector<double> sample_times(const SwitchingSchedule& schedule, double t_end,
                                        double sample_dt) {
    std::vector<double> times{0.0};
    for (std::size_t k = 1;; ++k) {
        const double t = static_cast<double>(k) * sample_dt;
        if (t > t_end * (1.0 + 1e-12)) break;
        times.push_back(std::min(t, t_end));
    }
    const double tau_total = schedule.period();
    std::vector<double> offsets;
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < schedule.phase_count(); ++k) {
        acc += schedule.dwell_time(k);
        offsets.push_back(acc);
    }
    for (std::size_t m = 0;; ++m) {
        const double base = static_cast<double>(m) * tau_total;
        if (base > t_end * (1.0 + 1e-12)) break;
        if (m > 0 && base <= t_end) times.push_back(base);
        for (double off : offsets) {
            const double t = base + off;
            if (t <= t_end * (1.0 + 1e-12)) times.push_back(std::min(t, t_end));
        }
    }
    times.push_back(t_end);
    std::sort(times.begin(), times.end());
    std::vector<double> out;
    for (double t : times) {
        if (out.empty() || t - out.back() > 1e-12 * std::max(1.0, t)) out.push_back(t);
    }
    return out;
}

/// Phase index active at time t (half-open dwell intervals within the period).
inline std::size_t phase_at(const SwitchingSchedule& schedule, double t) {
    const double T = schedule.period();
    double s = std::fmod(t, T);
    if (s < 0.0) s += T;
    double acc = 0.0;
    for (std::size_t k = 0; k < schedule.phase_count(); ++k) {
        acc += schedule.dwell_time(k);
        if (s < acc - 1e-12 * std::max(1.0, acc)) return k;
    }
    return schedule.phase_count() - 1;
}

/// Piecewise-exact propagation of z' = D_phase(t) z with cached sub-interval
/// exponentials.
template <typename Emit>
inline void propagate_piecewise(const SwitchingSchedule& schedule,
                                const std::vector<DenseMatrix>& phase_matrices,
                                std::vector<double> z, double t_end, double sample_dt,
                                bool& overflow, Emit&& emit) {
    if (!(t_end > 0.0) || !std::isfinite(t_end))
        throw validation_error("t_end must be positive and finite");
    if (!(sample_dt > 0.0) || !std::isfinite(sample_dt))
        throw validation_error("sample_dt must be positive and finite");
    const std::vector<double> times = sample_times(schedule, t_end, sample_dt);
    std::map<std::pair<std::size_t, double>, DenseMatrix> cache;
    emit(times[0], z);
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double t0 = times[k - 1];
        const double t1 = times[k];
        const double dt = t1 - t0;
        const std::size_t phase = phase_at(schedule, 0.5 * (t0 + t1));
        auto it = cache.find({phase, dt});
        if (it == cache.end())
            it = cache.emplace(std::make_pair(phase, dt), mat_exp(phase_matrices[phase], dt))
                     .first;
        z = it->second.apply(z);
        if (vector_norm(z) > kOverflowLimit) {
            overflow = true;
            return;
        }
        emit(t1, z);
    }
}

} // namespace detail

/**
 * @brief Propagates the error system e' = D(t) e piecewise-exactly (one
 *        matrix exponential per constant-topology sub-interval).
 *
 * Samples are emitted every sample_dt and at every switching instant.
 * Diverging traces are truncated at 1e150 with the overflow flag set.
 */
inline SimulationTrace propagate_error(const SystemSpec& spec,
                                       const SwitchingSchedule& schedule, const PinConfig& pins,
                                       const InitialCondition& init, double t_end,
                                       double sample_dt) {
    init.validate(schedule.node_count(), spec.state_dim());
    const std::vector<DenseMatrix> ds = phase_error_matrices(spec, schedule, pins);
    SimulationTrace trace;
    detail::propagate_piecewise(schedule, ds, init.stacked_error(), t_end, sample_dt,
                                trace.overflow, [&](double t, const std::vector<double>& e) {
                                    trace.times.push_back(t);
                                    trace.error_norms.push_back(vector_norm(e));
                                });
    return trace;
}

/**
 * @brief Propagates the full pinned system: all node states plus the
 *        reference trajectory c' = A c, stacked into one piecewise-LTI system.
 */
inline SimulationTrace propagate_full(const SystemSpec& spec,
                                      const SwitchingSchedule& schedule, const PinConfig& pins,
                                      const InitialCondition& init, double t_end,
                                      double sample_dt) {
    init.validate(schedule.node_count(), spec.state_dim());
    const std::size_t n = spec.state_dim();
    const std::size_t n_nodes = static_cast<std::size_t>(schedule.node_count());
    const DenseMatrix w = pins.gain_matrix(schedule.node_count());

    // stacked [x; c] system: x' = (I(x)A - (rL+W)(x)Lambda) x + (W(x)Lambda)(1(x)I) c
    std::vector<DenseMatrix> fs;
    for (const Phase& p : schedule.phases()) {
        const DenseMatrix d = error_matrix(spec, laplacian(p.topology), pins);
        DenseMatrix f((n_nodes + 1) * n, (n_nodes + 1) * n);
        for (std::size_t i = 0; i < n_nodes * n; ++i)
            for (std::size_t j = 0; j < n_nodes * n; ++j) f(i, j) = d(i, j);
        const DenseMatrix wl = kron(w, spec.Lambda);
        for (std::size_t i = 0; i < n_nodes; ++i)
            for (std::size_t p_ = 0; p_ < n; ++p_)
                for (std::size_t q = 0; q < n; ++q) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < n_nodes; ++j)
                        s += wl(i * n + p_, j * n + q);
                    f(i * n + p_, n_nodes * n + q) = s;
                }
        for (std::size_t p_ = 0; p_ < n; ++p_)
            for (std::size_t q = 0; q < n; ++q)
                f(n_nodes * n + p_, n_nodes * n + q) = spec.A(p_, q);
        fs.push_back(std::move(f));
    }

    std::vector<double> z;
    for (const auto& x : init.node_states) z.insert(z.end(), x.begin(), x.end());
    z.insert(z.end(), init.reference.begin(), init.reference.end());

    SimulationTrace trace;
    detail::propagate_piecewise(
        schedule, fs, std::move(z), t_end, sample_dt, trace.overflow,
        [&](double t, const std::vector<double>& zz) {
            trace.times.push_back(t);
            std::vector<std::vector<double>> nodes(n_nodes);
            std::vector<double> c(zz.begin() + static_cast<std::ptrdiff_t>(n_nodes * n),
                                  zz.end());
            double err2 = 0.0;
            for (std::size_t i = 0; i < n_nodes; ++i) {
                nodes[i].assign(zz.begin() + static_cast<std::ptrdiff_t>(i * n),
                                zz.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
                for (std::size_t k = 0; k < n; ++k) {
                    const double d = nodes[i][k] - c[k];
                    err2 += d * d;
                }
            }
            trace.error_norms.push_back(std::sqrt(err2));
            trace.node_states.push_back(std::move(nodes));
            trace.reference.push_back(std::move(c));
        });
    return trace;
}

/**
 * @brief Empirical convergence rate: least-squares slope of ln||e(t)|| versus
 *        t over the final half of the samples.
 */
inline double empirical_rate(const SimulationTrace& trace, double fit_fraction = 0.5) {
    if (!(fit_fraction > 0.0) || fit_fraction > 1.0)
        throw validation_error("fit_fraction must lie in (0,1]");
    const std::size_t total = trace.times.size();
    const std::size_t start =
        total - static_cast<std::size_t>(std::floor(fit_fraction * static_cast<double>(total)));
    if (total < start + 10)
        throw insufficient_data_error("empirical_rate needs at least 10 samples in the fit "
                                      "window, got " + std::to_string(total - start));
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    const double count = static_cast<double>(total - start);
    for (std::size_t k = start; k < total; ++k) {
        if (!(trace.error_norms[k] > 0.0))
            throw degenerate_trace_error("zero error norm at t=" +
                                         std::to_string(trace.times[k]) +
                                         " inside the fit window");
        const double t = trace.times[k];
        const double y = std::log(trace.error_norms[k]);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    const double denom = count * stt - st * st;
    if (denom == 0.0)
        throw insufficient_data_error("empirical_rate fit window has no time spread");
    return (count * sty - st * sy) / denom;
}

} // namespace pinsync
