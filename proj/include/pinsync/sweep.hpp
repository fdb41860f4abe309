#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "pinsync/analysis.hpp"

namespace pinsync {

/// Synchronization speeds over a grid of switching periods.
struct SweepTable {
    std::vector<double> periods;              ///< strictly increasing
    std::vector<int> nodes;                   ///< candidate node order for columns
    std::vector<std::vector<double>> speeds;  ///< [period][node]
    std::vector<int> best_node;               ///< per-period argmin with low-index tie-break
};

/// Log-spaced default grid covering both the fast-switching regime and the
/// slow-switching one.
inline std::vector<double> default_period_grid(double t_min = 1e-3, double t_max = 10.0,
                                               std::size_t points = 200) {
    if (!(t_min > 0.0) || !(t_max > t_min) || points < 2)
        throw validation_error("period grid requires 0 < t_min < t_max and >= 2 points");
    std::vector<double> grid(points);
    for (std::size_t k = 0; k < points; ++k)
        grid[k] = std::exp(std::log(t_min) + (std::log(t_max) - std::log(t_min)) *
                                                 static_cast<double>(k) /
                                                 static_cast<double>(points - 1));
    return grid;
}

namespace detail {

inline int argmin_node(const std::vector<int>& nodes, const std::vector<double>& speeds) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < speeds.size(); ++j)
        if (speeds[j] < speeds[best] ||
            (speeds[j] == speeds[best] && nodes[j] < nodes[best]))
            best = j;
    return nodes[best];
}

} // namespace detail

/**
 * @brief Evaluates the speed table b_{T,i} over a period grid, dwell
 *        fractions fixed and T varied.
 */
inline SweepTable sweep_periods(const SystemSpec& spec, const SwitchingSchedule& schedule,
                                double gain, const std::vector<double>& t_grid,
                                std::vector<int> candidates = {}) {
    if (candidates.empty()) candidates = all_nodes(schedule);
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        if (!(t_grid[k] > 0.0))
            throw validation_error("sweep grid periods must be positive");
        if (k > 0 && !(t_grid[k] > t_grid[k - 1]))
            throw validation_error("sweep grid must be strictly increasing");
    }
    SweepTable table;
    table.periods = t_grid;
    table.nodes = candidates;
    for (double t : t_grid) {
        const SwitchingSchedule s = schedule.with_period(t);
        std::vector<double> row;
        row.reserve(candidates.size());
        for (int node : candidates) row.push_back(sync_speed(spec, s, node, gain).speed);
        table.best_node.push_back(detail::argmin_node(candidates, row));
        table.speeds.push_back(std::move(row));
    }
    return table;
}

/**
 * @brief First period at which the most influential node changes, refined by
 *        bisection between the bracketing grid points to 1e-6 relative
 *        tolerance. Empty if the best node never changes on the grid.
 *
 * `speeds_at` re-evaluates candidate speeds at an arbitrary period and must
 * be consistent with the table's node order.
 */
inline std::optional<double> find_bifurcation(
    const SweepTable& table,
    const std::function<std::vector<double>(double)>& speeds_at) {
    if (table.periods.size() < 2)
        throw insufficient_data_error("find_bifurcation needs at least 2 grid periods");
    const int i0 = table.best_node.front();
    std::size_t k = 1;
    while (k < table.periods.size() && table.best_node[k] == i0) ++k;
    if (k == table.periods.size()) return std::nullopt;
    double lo = table.periods[k - 1];
    double hi = table.periods[k];
    while (hi - lo > 1e-6 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (detail::argmin_node(table.nodes, speeds_at(mid)) == i0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Model-backed overload: refines against fresh sync_speed evaluations.
inline std::optional<double> find_bifurcation(const SweepTable& table, const SystemSpec& spec,
                                              const SwitchingSchedule& schedule, double gain) {
    return find_bifurcation(table, [&](double t) {
        const SwitchingSchedule s = schedule.with_period(t);
        std::vector<double> row;
        row.reserve(table.nodes.size());
        for (int node : table.nodes) row.push_back(sync_speed(spec, s, node, gain).speed);
        return row;
    });
}

/// Side-by-side comparison of the certified threshold and the observed
/// bifurcation.
struct ThresholdComparison {
    ThresholdReport threshold;
    std::optional<double> first_bifurcation;
    bool conservative = false; ///< T0 <= first bifurcation (vacuously true if none)
    bool vacuous = false;      ///< no bifurcation found on the grid
};

inline ThresholdComparison threshold_vs_bifurcation(const SystemSpec& spec,
                                                    const SwitchingSchedule& schedule,
                                                    double gain,
                                                    const std::vector<double>& t_grid,
                                                    std::vector<int> candidates = {},
                                                    double t_max = 100.0) {
    ThresholdComparison cmp;
    cmp.threshold = threshold_T0(spec, schedule, gain, candidates, t_max);
    const SweepTable table = sweep_periods(spec, schedule, gain, t_grid, candidates);
    cmp.first_bifurcation = find_bifurcation(table, spec, schedule, gain);
    if (cmp.first_bifurcation) {
        cmp.conservative = cmp.threshold.T0 <= *cmp.first_bifurcation;
    } else {
        cmp.conservative = true;
        cmp.vacuous = true;
    }
    return cmp;
}

} // namespace pinsync
