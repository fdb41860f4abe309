#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pinsync/analysis.hpp"
#include "pinsync/simulate.hpp"

namespace pinsync {

/// A complete analysis input: system, schedule, gain, candidates, initial
/// condition. Node indices are 1-based throughout.
struct Scenario {
    std::string name;
    SystemSpec system;
    SwitchingSchedule schedule;
    double gain = 0.0;
    std::vector<int> candidate_pins; ///< empty means all nodes
    InitialCondition init;

    std::vector<int> candidates() const {
        return candidate_pins.empty() ? all_nodes(schedule) : candidate_pins;
    }
};

namespace detail {

using nlohmann::json;

inline const json& require_field(const json& j, const std::string& key,
                                 const std::string& path) {
    if (!j.is_object() || !j.contains(key))
        throw validation_error("missing field " + path + "." + key);
    return j.at(key);
}

inline DenseMatrix parse_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty() || !j.front().is_array())
        throw validation_error(path + " must be a non-empty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j.front().size();
    std::vector<double> entries;
    entries.reserve(rows * cols);
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != cols)
            throw validation_error(path + " rows must all have length " + std::to_string(cols));
        for (const auto& v : row) {
            if (!v.is_number())
                throw validation_error(path + " entries must be numbers");
            entries.push_back(v.get<double>());
        }
    }
    try {
        return DenseMatrix(rows, cols, std::move(entries));
    } catch (const error& e) {
        throw validation_error(path + ": " + e.what());
    }
}

inline std::vector<double> parse_vector(const json& j, const std::string& path) {
    if (!j.is_array())
        throw validation_error(path + " must be an array of numbers");
    std::vector<double> v;
    for (const auto& x : j) {
        if (!x.is_number())
            throw validation_error(path + " entries must be numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

} // namespace detail

inline Scenario parse_scenario_json(const nlohmann::json& j) {
    using detail::require_field;
    const auto& sys = require_field(j, "system", "scenario");
    DenseMatrix a = detail::parse_matrix(require_field(sys, "A", "system"), "system.A");
    DenseMatrix lambda =
        detail::parse_matrix(require_field(sys, "Lambda", "system"), "system.Lambda");
    const auto& rj = require_field(sys, "r", "system");
    if (!rj.is_number())
        throw validation_error("system.r must be a number");

    const auto& sched = require_field(j, "schedule", "scenario");
    const auto& ncj = require_field(sched, "node_count", "schedule");
    if (!ncj.is_number_integer())
        throw validation_error("schedule.node_count must be an integer");
    const int node_count = ncj.get<int>();
    const auto& pj = require_field(sched, "period", "schedule");
    if (!pj.is_number())
        throw validation_error("schedule.period must be a number");
    const auto& phases_j = require_field(sched, "phases", "schedule");
    if (!phases_j.is_array() || phases_j.empty())
        throw validation_error("schedule.phases must be a non-empty array");

    std::vector<Phase> phases;
    std::size_t pk = 0;
    for (const auto& ph : phases_j) {
        const std::string path = "schedule.phases[" + std::to_string(pk) + "]";
        const auto& dfj = require_field(ph, "dwell_fraction", path);
        if (!dfj.is_number())
            throw validation_error(path + ".dwell_fraction must be a number");
        const auto& edges_j = require_field(ph, "edges", path);
        if (!edges_j.is_array())
            throw validation_error(path + ".edges must be an array");
        std::vector<Edge> edges;
        for (const auto& e : edges_j) {
            Edge edge;
            const auto& fj = require_field(e, "from", path + ".edges");
            const auto& tj = require_field(e, "to", path + ".edges");
            const auto& wj = require_field(e, "weight", path + ".edges");
            if (!fj.is_number_integer() || !tj.is_number_integer() || !wj.is_number())
                throw validation_error(path + ".edges entries need integer from/to and "
                                       "numeric weight");
            edge.from = fj.get<int>();
            edge.to = tj.get<int>();
            edge.weight = wj.get<double>();
            edges.push_back(edge);
        }
        try {
            phases.push_back(Phase{Topology(node_count, std::move(edges)), dfj.get<double>()});
        } catch (const error& e) {
            throw validation_error(path + ": " + e.what());
        }
        ++pk;
    }

    const auto& init_j = require_field(j, "init", "scenario");
    InitialCondition init;
    const auto& states_j = require_field(init_j, "node_states", "init");
    if (!states_j.is_array())
        throw validation_error("init.node_states must be an array of vectors");
    for (const auto& s : states_j)
        init.node_states.push_back(detail::parse_vector(s, "init.node_states"));
    init.reference = detail::parse_vector(require_field(init_j, "reference", "init"),
                                          "init.reference");

    const auto& gj = require_field(j, "gain", "scenario");
    if (!gj.is_number())
        throw validation_error("gain must be a number");
    const double gain = gj.get<double>();
    if (!(gain > 0.0))
        throw validation_error("gain must be positive");

    std::vector<int> candidates;
    if (j.contains("candidate_pins")) {
        for (const auto& c : j.at("candidate_pins")) {
            if (!c.is_number_integer())
                throw validation_error("candidate_pins entries must be integers");
            const int node = c.get<int>();
            if (node < 1 || node > node_count)
                throw validation_error("candidate_pins: node " + std::to_string(node) +
                                       " out of range [1," + std::to_string(node_count) + "]");
            candidates.push_back(node);
        }
    }

    std::string name = "scenario";
    if (j.contains("name")) {
        if (!j.at("name").is_string())
            throw validation_error("name must be a string");
        name = j.at("name").get<std::string>();
    }

    Scenario scenario{std::move(name),
                      SystemSpec(std::move(a), std::move(lambda), rj.get<double>()),
                      SwitchingSchedule(std::move(phases), pj.get<double>()), gain,
                      std::move(candidates), std::move(init)};
    scenario.init.validate(scenario.schedule.node_count(), scenario.system.state_dim());
    return scenario;
}

inline Scenario parse_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw validation_error("cannot open scenario file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw validation_error("scenario file " + path + " is not valid JSON: " + e.what());
    }
    return parse_scenario_json(j);
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
    nlohmann::json j;
    j["name"] = s.name;
    auto matrix_json = [](const DenseMatrix& m) {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t i = 0; i < m.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
            rows.push_back(std::move(row));
        }
        return rows;
    };
    j["system"]["A"] = matrix_json(s.system.A);
    j["system"]["Lambda"] = matrix_json(s.system.Lambda);
    j["system"]["r"] = s.system.r;
    j["gain"] = s.gain;
    j["schedule"]["node_count"] = s.schedule.node_count();
    j["schedule"]["period"] = s.schedule.period();
    nlohmann::json phases = nlohmann::json::array();
    for (const Phase& p : s.schedule.phases()) {
        nlohmann::json ph;
        ph["dwell_fraction"] = p.dwell_fraction;
        nlohmann::json edges = nlohmann::json::array();
        for (const Edge& e : p.topology.edges())
            edges.push_back({{"from", e.from}, {"to", e.to}, {"weight", e.weight}});
        ph["edges"] = std::move(edges);
        phases.push_back(std::move(ph));
    }
    j["schedule"]["phases"] = std::move(phases);
    if (!s.candidate_pins.empty()) j["candidate_pins"] = s.candidate_pins;
    j["init"]["node_states"] = s.init.node_states;
    j["init"]["reference"] = s.init.reference;
    return j;
}

} // namespace pinsync
