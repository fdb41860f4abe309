#pragma once

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "pinsync/matrix.hpp"

namespace pinsync {

/// Weighted directed edge; the edge delivers information from `from` to `to`.
/// Node indices are 1-based.
struct Edge {
    int from = 0;
    int to = 0;
    double weight = 0.0;
};

/**
 * @brief Weighted directed topology on N nodes.
 *
 * No self-loops, at most one edge per ordered pair, positive weights.
 */
class Topology {
public:
    Topology(int node_count, std::vector<Edge> edges)
        : node_count_(node_count), edges_(std::move(edges)) {
        if (node_count_ < 1)
            throw validation_error("topology.node_count must be positive");
        std::set<std::pair<int, int>> seen;
        for (const Edge& e : edges_) {
            if (e.from < 1 || e.from > node_count_ || e.to < 1 || e.to > node_count_)
                throw validation_error("topology.edges: node index " +
                                       std::to_string(e.from == 0 ? e.to : e.from) +
                                       " out of range [1," + std::to_string(node_count_) + "]");
            if (e.from == e.to)
                throw validation_error("topology.edges: self-loop at node " +
                                       std::to_string(e.from));
            if (!(e.weight > 0.0) || !std::isfinite(e.weight))
                throw validation_error("topology.edges: weight of edge " +
                                       std::to_string(e.from) + "->" + std::to_string(e.to) +
                                       " must be positive and finite");
            if (!seen.insert({e.from, e.to}).second)
                throw validation_error("topology.edges: duplicate edge " +
                                       std::to_string(e.from) + "->" + std::to_string(e.to));
        }
    }

    int node_count() const noexcept { return node_count_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

private:
    int node_count_;
    std::vector<Edge> edges_;
};

/**
 * @brief Graph Laplacian: l_ij = -w(j->i) for i != j, l_ii = sum of incoming
 *        weights, so each row aggregates node i's in-neighbors and sums to zero.
 */
inline DenseMatrix laplacian(const Topology& topology) {
    const std::size_t n = static_cast<std::size_t>(topology.node_count());
    DenseMatrix l(n, n);
    for (const Edge& e : topology.edges()) {
        const std::size_t i = static_cast<std::size_t>(e.to - 1);
        const std::size_t j = static_cast<std::size_t>(e.from - 1);
        l(i, j) -= e.weight;
        l(i, i) += e.weight;
    }
    return l;
}

/// One dwell interval of a periodic switching schedule.
struct Phase {
    Topology topology;
    double dwell_fraction = 0.0;
};

/**
 * @brief Periodic sequence of topologies with dwell fractions summing to one.
 */
class SwitchingSchedule {
public:
    SwitchingSchedule(std::vector<Phase> phases, double period)
        : phases_(std::move(phases)), period_(period) {
        if (phases_.empty())
            throw validation_error("schedule.phases must contain at least one phase");
        if (!(period_ > 0.0) || !std::isfinite(period_))
            throw validation_error("schedule.period must be positive and finite");
        const int n = phases_.front().topology.node_count();
        double sum = 0.0;
        for (const Phase& p : phases_) {
            if (p.topology.node_count() != n)
                throw validation_error("schedule.phases: all topologies must share node_count");
            if (!(p.dwell_fraction > 0.0) || p.dwell_fraction > 1.0)
                throw validation_error("schedule.phases: dwell_fraction must lie in (0,1]");
            sum += p.dwell_fraction;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw validation_error("schedule.phases: dwell fractions sum to " +
                                   std::to_string(sum) + ", expected 1");
    }

    /// Equal-dwell schedule: every phase holds for period / phase_count.
    static SwitchingSchedule equal_dwell(std::vector<Topology> topologies, double period) {
        std::vector<Phase> phases;
        phases.reserve(topologies.size());
        const double f = 1.0 / static_cast<double>(topologies.size());
        for (auto& t : topologies) phases.push_back(Phase{std::move(t), f});
        return SwitchingSchedule(std::move(phases), period);
    }

    /// Same phases, different period.
    SwitchingSchedule with_period(double period) const {
        return SwitchingSchedule(phases_, period);
    }

    const std::vector<Phase>& phases() const noexcept { return phases_; }
    double period() const noexcept { return period_; }
    int node_count() const noexcept { return phases_.front().topology.node_count(); }
    std::size_t phase_count() const noexcept { return phases_.size(); }
    double dwell_time(std::size_t k) const { return phases_.at(k).dwell_fraction * period_; }

private:
    std::vector<Phase> phases_;
    double period_;
};

/// Per-phase Laplacians plus their dwell-weighted average.
struct LaplacianSet {
    std::vector<DenseMatrix> per_phase;
    DenseMatrix average;
};

inline LaplacianSet laplacian_set(const SwitchingSchedule& schedule) {
    LaplacianSet set;
    const std::size_t n = static_cast<std::size_t>(schedule.node_count());
    set.average = DenseMatrix::zero(n, n);
    for (const Phase& p : schedule.phases()) {
        set.per_phase.push_back(laplacian(p.topology));
        set.average += p.dwell_fraction * set.per_phase.back();
    }
    return set;
}

/**
 * @brief Directed spanning-tree test on a Laplacian: true iff some root node
 *        reaches every other node along influence edges (j->i iff l_ij < 0).
 */
inline bool has_spanning_tree(const DenseMatrix& l) {
    if (!l.square())
        throw validation_error("has_spanning_tree requires a square Laplacian");
    const std::size_t n = l.rows();
    const double scale = std::max(1.0, l.max_abs());
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row += l(i, j);
            if (i != j && l(i, j) > 1e-9 * scale)
                throw validation_error("has_spanning_tree: positive off-diagonal entry");
        }
        if (std::abs(row) > 1e-9 * scale)
            throw validation_error("has_spanning_tree: row sums must be zero");
    }
    for (std::size_t root = 0; root < n; ++root) {
        std::vector<bool> seen(n, false);
        std::vector<std::size_t> stack{root};
        seen[root] = true;
        std::size_t count = 1;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < n; ++v)
                if (!seen[v] && l(v, u) < 0.0) {
                    seen[v] = true;
                    ++count;
                    stack.push_back(v);
                }
        }
        if (count == n) return true;
    }
    return false;
}

} // namespace pinsync
