#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pinsync/eig.hpp"
#include "pinsync/expm.hpp"
#include "pinsync/graph.hpp"
#include "pinsync/matrix.hpp"

namespace pinsync {

/// Node dynamics A, inner coupling Lambda, coupling strength r.
struct SystemSpec {
    DenseMatrix A;
    DenseMatrix Lambda;
    double r = 1.0;

    SystemSpec(DenseMatrix a, DenseMatrix lambda, double coupling)
        : A(std::move(a)), Lambda(std::move(lambda)), r(coupling) {
        if (!A.square() || !Lambda.square() || A.rows() != Lambda.rows())
            throw validation_error("system: A and Lambda must be square with equal size");
        if (!(r > 0.0) || !std::isfinite(r))
            throw validation_error("system.r must be positive and finite");
    }

    std::size_t state_dim() const noexcept { return A.rows(); }
};

/// Set of pinned nodes (1-based) with positive gains.
struct PinConfig {
    std::vector<std::pair<int, double>> pins;

    static PinConfig single(int node, double gain) { return PinConfig{{{node, gain}}}; }

    void validate(int node_count) const {
        std::vector<int> seen;
        for (const auto& [node, gain] : pins) {
            if (node < 1 || node > node_count)
                throw validation_error("pin node " + std::to_string(node) +
                                       " out of range [1," + std::to_string(node_count) + "]");
            if (!(gain > 0.0) || !std::isfinite(gain))
                throw validation_error("pin gain for node " + std::to_string(node) +
                                       " must be positive and finite");
            if (std::find(seen.begin(), seen.end(), node) != seen.end())
                throw validation_error("pin node " + std::to_string(node) + " listed twice");
            seen.push_back(node);
        }
    }

    /// N x N diagonal gain matrix W.
    DenseMatrix gain_matrix(int node_count) const {
        validate(node_count);
        DenseMatrix w(static_cast<std::size_t>(node_count), static_cast<std::size_t>(node_count));
        for (const auto& [node, gain] : pins) w(node - 1, node - 1) = gain;
        return w;
    }
};

/**
 * @brief Error-system matrix D = I_N (x) A - (r L + W) (x) Lambda for one
 *        topology phase.
 */
inline DenseMatrix error_matrix(const SystemSpec& spec, const DenseMatrix& l_phase,
                                const PinConfig& pins) {
    if (!l_phase.square())
        throw dimension_error("error_matrix: Laplacian must be square");
    const int n_nodes = static_cast<int>(l_phase.rows());
    const DenseMatrix w = pins.gain_matrix(n_nodes);
    return kron(DenseMatrix::identity(l_phase.rows()), spec.A) -
           kron(spec.r * l_phase + w, spec.Lambda);
}

/// Per-phase error matrices for a whole schedule, in phase order.
inline std::vector<DenseMatrix> phase_error_matrices(const SystemSpec& spec,
                                                     const SwitchingSchedule& schedule,
                                                     const PinConfig& pins) {
    std::vector<DenseMatrix> out;
    out.reserve(schedule.phase_count());
    for (const Phase& p : schedule.phases())
        out.push_back(error_matrix(spec, laplacian(p.topology), pins));
    return out;
}

/**
 * @brief Monodromy matrix over one switching period.
 *
 * R(T) = exp(tau_{p-1} D_{p-1}) * ... * exp(tau_0 D_0); later phases multiply
 * on the left, so R(T) maps e(0) to e(T).
 */
inline DenseMatrix monodromy(const SystemSpec& spec, const SwitchingSchedule& schedule,
                             const PinConfig& pins) {
    const std::vector<DenseMatrix> ds = phase_error_matrices(spec, schedule, pins);
    DenseMatrix r = DenseMatrix::identity(ds.front().rows());
    for (std::size_t k = 0; k < ds.size(); ++k)
        r = mat_exp(ds[k], schedule.dwell_time(k)) * r;
    return r;
}

/// Monodromy spectral radius, synchronization speed, and stability verdict
/// for one pinned node.
struct NodeSpeedReport {
    int node = 0;
    double rho = 0.0;
    double speed = 0.0;
    bool stable = false;
};

/**
 * @brief Synchronization speed b = ln(rho(R(T)))/T for a single pinned node.
 *
 * rho = 0 (deadbeat monodromy) reports speed = -infinity and stable = true.
 */
inline NodeSpeedReport sync_speed(const SystemSpec& spec, const SwitchingSchedule& schedule,
                                  int pin_node, double gain) {
    const DenseMatrix r = monodromy(spec, schedule, PinConfig::single(pin_node, gain));
    NodeSpeedReport report;
    report.node = pin_node;
    report.rho = spectral_radius(r);
    report.speed = report.rho > 0.0 ? std::log(report.rho) / schedule.period()
                                    : -std::numeric_limits<double>::infinity();
    report.stable = report.rho < 1.0;
    return report;
}

/// All node indices 1..N.
inline std::vector<int> all_nodes(const SwitchingSchedule& schedule) {
    std::vector<int> nodes(static_cast<std::size_t>(schedule.node_count()));
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = static_cast<int>(i) + 1;
    return nodes;
}

/**
 * @brief Ranks candidate driver nodes by synchronization speed, one single
 *        pin at a time at uniform gain. Most influential (smallest b) first;
 *        ties break toward the lower node index.
 */
inline std::vector<NodeSpeedReport> rank_nodes(const SystemSpec& spec,
                                               const SwitchingSchedule& schedule, double gain,
                                               std::vector<int> candidates = {}) {
    if (candidates.empty()) candidates = all_nodes(schedule);
    std::vector<NodeSpeedReport> reports;
    reports.reserve(candidates.size());
    for (int node : candidates) reports.push_back(sync_speed(spec, schedule, node, gain));
    std::stable_sort(reports.begin(), reports.end(),
                     [](const NodeSpeedReport& a, const NodeSpeedReport& b) {
                         if (a.speed != b.speed) return a.speed < b.speed;
                         return a.node < b.node;
                     });
    return reports;
}

/// Average-system error matrix D_bar_i built from the dwell-weighted mean
/// Laplacian.
inline DenseMatrix average_error_matrix(const SystemSpec& spec,
                                        const SwitchingSchedule& schedule,
                                        const PinConfig& pins) {
    return error_matrix(spec, laplacian_set(schedule).average, pins);
}

/// Convergence speed of the average system: max Re(lambda(D_bar_i)).
inline double average_speed(const SystemSpec& spec, const SwitchingSchedule& schedule,
                            int pin_node, double gain) {
    return spectral_abscissa(
        average_error_matrix(spec, schedule, PinConfig::single(pin_node, gain)));
}

/// Switching-period threshold estimate for the average-system ranking.
struct ThresholdReport {
    int best_node = 0;                  ///< i0, average-system most influential node
    std::vector<int> candidates;        ///< node order of the vectors below
    std::vector<double> avg_speeds;     ///< b_bar per candidate
    std::vector<double> bound_constants; ///< d per candidate
    double T0 = 0.0;
    double residual = 0.0;
    bool saturated = false;             ///< no crossing found below t_max
};

namespace detail {

struct ThresholdCurves {
    double b_best = 0.0, d_best = 0.0;
    std::vector<double> b_other, d_other;

    /// upper envelope of the best node minus lower envelope of the runners-up;
    /// positive while the average-system ranking is certified.
    double margin(double t) const {
        const double upper =
            std::exp(b_best * t) + 2.0 * (std::expm1(d_best * t) - d_best * t);
        double lowest = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < b_other.size(); ++j) {
            const double lower =
                std::exp(b_other[j] * t) - 2.0 * (std::expm1(d_other[j] * t) - d_other[j] * t);
            lowest = std::min(lowest, lower);
        }
        return lowest - upper;
    }
};

} // namespace detail

/**
 * @brief Estimates the switching-period threshold T0 below which the
 *        average-system most influential node is certified to stay best.
 *
 * Evaluates the envelope gap on a log-spaced grid from 1e-9 to t_max, locates
 * the first sign change and bisects it to 1e-13 relative tolerance. Requires
 * a strictly best average-system node.
 */
inline ThresholdReport threshold_T0(const SystemSpec& spec, const SwitchingSchedule& schedule,
                                    double gain, std::vector<int> candidates = {},
                                    double t_max = 100.0) {
    if (candidates.empty()) candidates = all_nodes(schedule);
    if (candidates.size() < 2)
        throw validation_error("threshold_T0 needs at least two candidate nodes");

    ThresholdReport report;
    report.candidates = candidates;
    for (int node : candidates) {
        const PinConfig pins = PinConfig::single(node, gain);
        report.avg_speeds.push_back(
            spectral_abscissa(average_error_matrix(spec, schedule, pins)));
        double d = 0.0;
        for (const DenseMatrix& dm : phase_error_matrices(spec, schedule, pins))
            d = std::max(d, spectral_norm(dm));
        report.bound_constants.push_back(d);
    }

    std::size_t best = 0;
    for (std::size_t j = 1; j < candidates.size(); ++j)
        if (report.avg_speeds[j] < report.avg_speeds[best]) best = j;
    report.best_node = candidates[best];

    double second = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < candidates.size(); ++j)
        if (j != best) second = std::min(second, report.avg_speeds[j]);
    const double gap = second - report.avg_speeds[best];
    if (!(gap > 1e-12 * std::max(1.0, std::abs(report.avg_speeds[best]))))
        throw validation_error("threshold_T0: average-system best node is not strictly best "
                               "(speed gap " + std::to_string(gap) + ")");

    detail::ThresholdCurves curves;
    curves.b_best = report.avg_speeds[best];
    curves.d_best = report.bound_constants[best];
    for (std::size_t j = 0; j < candidates.size(); ++j)
        if (j != best) {
            curves.b_other.push_back(report.avg_speeds[j]);
            curves.d_other.push_back(report.bound_constants[j]);
        }

    const int grid_points = 400;
    double lo = 0.0, hi = 0.0;
    bool bracketed = false;
    double prev_t = 1e-9;
    if (curves.margin(prev_t) <= 0.0) {
        // crossing below the grid start; bracket against zero, where the
        // margin vanishes with positive slope
        lo = 0.0;
        hi = prev_t;
        bracketed = true;
    } else {
        for (int k = 1; k <= grid_points; ++k) {
            const double t =
                std::exp(std::log(1e-9) +
                         (std::log(t_max) - std::log(1e-9)) * static_cast<double>(k) /
                             static_cast<double>(grid_points));
            if (curves.margin(t) <= 0.0) {
                lo = prev_t;
                hi = t;
                bracketed = true;
                break;
            }
            prev_t = t;
        }
    }

    if (!bracketed) {
        report.T0 = t_max;
        report.saturated = true;
        report.residual = std::abs(curves.margin(t_max));
        return report;
    }

    while (hi - lo > 1e-13 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (curves.margin(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    report.T0 = 0.5 * (lo + hi);
    report.residual = std::abs(curves.margin(report.T0));
    return report;
}

} // namespace pinsync
