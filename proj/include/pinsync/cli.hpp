#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pinsync/random_scenario.hpp"
#include "pinsync/scenario.hpp"
#include "pinsync/sweep.hpp"

namespace pinsync::cli {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << text;
    } else {
        std::ofstream f(out_path);
        if (!f)
            throw validation_error("cannot open output file " + out_path);
        f << text;
    }
}

inline void require_candidate(const Scenario& s, int node) {
    if (node < 1 || node > s.schedule.node_count())
        throw validation_error("--node " + std::to_string(node) + " out of range [1," +
                               std::to_string(s.schedule.node_count()) + "]");
}

inline std::string rank_csv(const std::vector<NodeSpeedReport>& reports) {
    std::ostringstream os;
    os << "node,speed,rho,stable\n";
    for (const NodeSpeedReport& r : reports)
        os << r.node << ',' << fmt(r.speed) << ',' << fmt(r.rho) << ','
           << (r.stable ? 1 : 0) << '\n';
    return os.str();
}

inline std::string trace_csv(const SimulationTrace& trace) {
    std::ostringstream os;
    os << "t,error_norm";
    const bool full = !trace.node_states.empty();
    if (full) {
        for (std::size_t i = 0; i < trace.node_states.front().size(); ++i)
            for (std::size_t k = 0; k < trace.node_states.front()[i].size(); ++k)
                os << ",x" << (i + 1) << '_' << (k + 1);
        for (std::size_t k = 0; k < trace.reference.front().size(); ++k)
            os << ",c_" << (k + 1);
    }
    os << '\n';
    for (std::size_t s = 0; s < trace.times.size(); ++s) {
        os << fmt(trace.times[s]) << ',' << fmt(trace.error_norms[s]);
        if (full) {
            for (const auto& x : trace.node_states[s])
                for (double v : x) os << ',' << fmt(v);
            for (double v : trace.reference[s]) os << ',' << fmt(v);
        }
        os << '\n';
    }
    if (trace.overflow) os << "# overflow: trace truncated at magnitude 1e150\n";
    return os.str();
}

inline std::string sweep_csv(const SweepTable& table, const std::optional<double>& bifurcation) {
    std::ostringstream os;
    os << "period";
    for (int node : table.nodes) os << ",b_node_" << node;
    os << ",best_node\n";
    for (std::size_t k = 0; k < table.periods.size(); ++k) {
        os << fmt(table.periods[k]);
        for (double b : table.speeds[k]) os << ',' << fmt(b);
        os << ',' << table.best_node[k] << '\n';
    }
    os << "# bifurcation," << (bifurcation ? fmt(*bifurcation) : std::string("none")) << '\n';
    return os.str();
}

inline nlohmann::json threshold_json(const ThresholdComparison& cmp) {
    nlohmann::json j;
    j["best_node"] = cmp.threshold.best_node;
    j["candidates"] = cmp.threshold.candidates;
    j["avg_speeds"] = cmp.threshold.avg_speeds;
    j["bound_constants"] = cmp.threshold.bound_constants;
    j["T0"] = cmp.threshold.T0;
    j["residual"] = cmp.threshold.residual;
    j["saturated"] = cmp.threshold.saturated;
    if (cmp.first_bifurcation)
        j["first_bifurcation"] = *cmp.first_bifurcation;
    else
        j["first_bifurcation"] = nullptr;
    j["conservative"] = cmp.conservative;
    j["vacuous"] = cmp.vacuous;
    return j;
}

} // namespace detail

/**
 * @brief Runs one CLI command. Returns 0 on success, 1 on validation or
 *        domain errors, 2 on numeric non-convergence or overflow.
 */
inline int run_command(const std::vector<std::string>& argv, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
    CLI::App app{"Driver-node analysis for pinned multi-agent systems with "
                 "periodically switching topology"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_path;
    int node = 0;
    double t_end = 10.0, dt = 0.01;
    bool full = false;
    double t_min = 1e-3, t_max_sweep = 10.0;
    std::size_t points = 200;
    double t_max_threshold = 100.0;
    int gen_nodes = 4, gen_phases = 2, gen_dim = 2;
    std::uint64_t seed = 0;

    auto add_scenario_arg = [&](CLI::App* cmd) {
        cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
        cmd->add_option("--out", out_path, "write output to a file instead of stdout");
    };

    CLI::App* validate = app.add_subcommand("validate", "check a scenario file");
    add_scenario_arg(validate);

    CLI::App* rank = app.add_subcommand("rank", "rank candidate driver nodes");
    add_scenario_arg(rank);

    CLI::App* analyze = app.add_subcommand("analyze", "analyze a single pinned node");
    add_scenario_arg(analyze);
    analyze->add_option("--node", node, "node to pin (1-based)")->required();

    CLI::App* simulate = app.add_subcommand("simulate", "propagate the error system");
    add_scenario_arg(simulate);
    simulate->add_option("--node", node, "node to pin (1-based)")->required();
    simulate->add_option("--t-end", t_end, "simulation end time");
    simulate->add_option("--dt", dt, "sample spacing");
    simulate->add_flag("--full", full, "propagate full node states and reference");

    CLI::App* sweep = app.add_subcommand("sweep", "speed table over a period grid");
    add_scenario_arg(sweep);
    sweep->add_option("--t-min", t_min, "smallest period");
    sweep->add_option("--t-max", t_max_sweep, "largest period");
    sweep->add_option("--points", points, "grid size");

    CLI::App* threshold = app.add_subcommand("threshold", "estimate the period threshold T0");
    add_scenario_arg(threshold);
    threshold->add_option("--t-max", t_max_threshold, "search ceiling for T0");
    threshold->add_option("--t-min", t_min, "smallest sweep period");
    threshold->add_option("--points", points, "sweep grid size");

    CLI::App* gen = app.add_subcommand("gen", "generate a random scenario file");
    gen->add_option("--seed", seed, "RNG seed")->required();
    gen->add_option("--nodes", gen_nodes, "node count");
    gen->add_option("--phases", gen_phases, "phase count");
    gen->add_option("--state-dim", gen_dim, "per-node state dimension");
    gen->add_option("--out", out_path, "write output to a file instead of stdout");

    std::vector<std::string> args(argv);
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "E_USAGE: " << e.what() << '\n';
        return 1;
    }

    try {
        if (gen->parsed()) {
            RandomScenarioOptions opt;
            opt.nodes = gen_nodes;
            opt.phases = gen_phases;
            opt.state_dim = gen_dim;
            const Scenario s = random_scenario(seed, opt);
            detail::emit(scenario_to_json(s).dump(2) + "\n", out_path, out);
            return 0;
        }

        const Scenario s = parse_scenario(scenario_path);

        if (validate->parsed()) {
            std::ostringstream os;
            os << "ok: " << s.name << " (N=" << s.schedule.node_count()
               << ", n=" << s.system.state_dim() << ", phases=" << s.schedule.phase_count()
               << ", T=" << fmt(s.schedule.period()) << ")\n";
            if (!has_spanning_tree(laplacian_set(s.schedule).average))
                os << "warning: average topology has no spanning tree; synchronization may "
                      "be impossible\n";
            detail::emit(os.str(), out_path, out);
        } else if (rank->parsed()) {
            detail::emit(detail::rank_csv(rank_nodes(s.system, s.schedule, s.gain,
                                                     s.candidates())),
                         out_path, out);
        } else if (analyze->parsed()) {
            detail::require_candidate(s, node);
            const NodeSpeedReport r = sync_speed(s.system, s.schedule, node, s.gain);
            nlohmann::json j{{"node", r.node},
                             {"rho", r.rho},
                             {"speed", r.speed},
                             {"stable", r.stable}};
            detail::emit(j.dump(2) + "\n", out_path, out);
        } else if (simulate->parsed()) {
            detail::require_candidate(s, node);
            const PinConfig pins = PinConfig::single(node, s.gain);
            const SimulationTrace trace =
                full ? propagate_full(s.system, s.schedule, pins, s.init, t_end, dt)
                     : propagate_error(s.system, s.schedule, pins, s.init, t_end, dt);
            detail::emit(detail::trace_csv(trace), out_path, out);
        } else if (sweep->parsed()) {
            const std::vector<double> grid = default_period_grid(t_min, t_max_sweep, points);
            const SweepTable table =
                sweep_periods(s.system, s.schedule, s.gain, grid, s.candidates());
            const std::optional<double> bif =
                find_bifurcation(table, s.system, s.schedule, s.gain);
            detail::emit(detail::sweep_csv(table, bif), out_path, out);
        } else if (threshold->parsed()) {
            const std::vector<double> grid = default_period_grid(t_min, t_max_sweep, points);
            const ThresholdComparison cmp = threshold_vs_bifurcation(
                s.system, s.schedule, s.gain, grid, s.candidates(), t_max_threshold);
            detail::emit(detail::threshold_json(cmp).dump(2) + "\n", out_path, out);
        }
        return 0;
    } catch (const convergence_error& e) {
        err << e.what() << '\n';
        return 2;
    } catch (const numeric_overflow& e) {
        err << e.what() << '\n';
        return 2;
    } catch (const error& e) {
        err << e.what() << '\n';
        return 1;
    }
}

} // namespace pinsync::cli
