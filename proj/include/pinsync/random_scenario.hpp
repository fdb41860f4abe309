#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pinsync/scenario.hpp"

namespace pinsync {

struct RandomScenarioOptions {
    int nodes = 4;
    int state_dim = 2;
    int phases = 2;
    bool identity_lambda = false;
    bool zero_dynamics = false;   ///< A = 0
    bool equal_dwell = true;
    double period_min = 0.3;
    double period_max = 1.5;
    double dynamics_scale = 0.5;  ///< A entries drawn from +-scale
    double gain_min = 2.0;
    double gain_max = 8.0;
};

/**
 * @brief Deterministic random test scenario. Phase 0 always contains a
 *        directed ring so the average topology has a spanning tree.
 */
inline Scenario random_scenario(std::uint64_t seed, const RandomScenarioOptions& opt = {}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> weight(0.5, 2.5);

    const int n_nodes = opt.nodes;
    const int dim = opt.state_dim;

    std::vector<Topology> topologies;
    for (int p = 0; p < opt.phases; ++p) {
        std::vector<Edge> edges;
        if (p == 0) {
            for (int i = 1; i <= n_nodes; ++i)
                edges.push_back(Edge{i, i % n_nodes + 1, weight(rng)});
        }
        for (int f = 1; f <= n_nodes; ++f)
            for (int t = 1; t <= n_nodes; ++t) {
                if (f == t) continue;
                if (p == 0 && t == f % n_nodes + 1) continue; // ring edge already present
                if (unit(rng) < 0.4) edges.push_back(Edge{f, t, weight(rng)});
            }
        topologies.push_back(Topology(n_nodes, std::move(edges)));
    }

    std::uniform_real_distribution<double> period_dist(opt.period_min, opt.period_max);
    const double period = period_dist(rng);
    std::vector<Phase> phases;
    if (opt.equal_dwell) {
        for (auto& t : topologies)
            phases.push_back(Phase{std::move(t), 1.0 / static_cast<double>(opt.phases)});
    } else {
        std::vector<double> cuts{0.0, 1.0};
        for (int k = 1; k < opt.phases; ++k) cuts.push_back(0.1 + 0.8 * unit(rng));
        std::sort(cuts.begin(), cuts.end());
        double used = 0.0;
        for (int k = 0; k < opt.phases; ++k) {
            double frac = cuts[static_cast<std::size_t>(k) + 1] - cuts[static_cast<std::size_t>(k)];
            if (k == opt.phases - 1) frac = 1.0 - used;
            used += frac;
            phases.push_back(Phase{std::move(topologies[static_cast<std::size_t>(k)]), frac});
        }
    }

    DenseMatrix a(static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
    if (!opt.zero_dynamics) {
        std::uniform_real_distribution<double> ad(-opt.dynamics_scale, opt.dynamics_scale);
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) = ad(rng);
    }
    DenseMatrix lambda = DenseMatrix::identity(static_cast<std::size_t>(dim));
    if (!opt.identity_lambda) {
        std::uniform_real_distribution<double> ld(-0.3, 0.3);
        for (std::size_t i = 0; i < lambda.rows(); ++i)
            for (std::size_t j = 0; j < lambda.cols(); ++j) lambda(i, j) += ld(rng);
    }
    std::uniform_real_distribution<double> rd(0.5, 1.5);
    const double r = rd(rng);
    std::uniform_real_distribution<double> gd(opt.gain_min, opt.gain_max);
    const double gain = gd(rng);

    InitialCondition init;
    std::uniform_real_distribution<double> xd(-3.0, 3.0);
    for (int i = 0; i < n_nodes; ++i) {
        std::vector<double> x(static_cast<std::size_t>(dim));
        for (double& v : x) v = xd(rng);
        init.node_states.push_back(std::move(x));
    }
    init.reference.resize(static_cast<std::size_t>(dim));
    for (double& v : init.reference) v = xd(rng);

    return Scenario{"random-" + std::to_string(seed),
                    SystemSpec(std::move(a), std::move(lambda), r),
                    SwitchingSchedule(std::move(phases), period),
                    gain,
                    {},
                    std::move(init)};
}

} // namespace pinsync
