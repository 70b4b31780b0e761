#include "evac/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <future>

namespace evac {

ClearanceEstimate clearance_time(const AssignmentResult& result, const Network& network,
                                 const ShelterSet& shelters, const DemandScenario& demand) {
    ClearanceEstimate estimate;
    estimate.converged = result.converged;
    if (demand.total_vehicles() == 0.0) return estimate;

    const OdMatrix& q = result.od_flows;
    double worst = 0.0;
    for (std::size_t c = 0; c < q.cols(); ++c) {
        const double attracted = q.col_sum(c);
        if (!(attracted > 0.0)) continue;
        const std::size_t node = q.shelters[c];

        double shelter_capacity = kUnreachable;
        for (const auto& s : shelters.candidates)
            if (network.find_node(s.node_id) == node) shelter_capacity = s.capacity;
        double inflow = 0.0;
        for (std::size_t link : network.in_links(node)) inflow += network.links()[link].capacity;
        const double intake = std::min(shelter_capacity, inflow);

        double longest_route = 0.0;
        for (std::size_t r = 0; r < q.rows(); ++r)
            if (q.at(r, c) > 0.0) longest_route = std::max(longest_route, result.od_costs.at(r, c));

        worst = std::max(worst, 60.0 * attracted / intake + longest_route);
    }
    // Round up to 5-minute steps; the slack absorbs rounding noise on exact multiples.
    estimate.minutes = 5.0 * std::ceil(worst / 5.0 - 1e-9);
    return estimate;
}

ScenarioOutcome solve_scenario(const ProblemBundle& bundle, std::size_t scenario, std::uint64_t seed) {
    GAConfig ga = bundle.ga;
    ga.rng_seed = seed;
    const BilevelProblem problem = bundle.problem(scenario);
    ScenarioOutcome out;
    out.report = ga_solve(problem, ga);

    ScenarioResultRow& row = out.row;
    row.scenario = bundle.scenarios[scenario].name;
    row.attraction = out.report.shelter_attraction;
    row.total_travel_time_min = out.report.best_total_evacuation_time;
    row.total_travel_time_h = row.total_travel_time_min / 60.0;
    row.selected = out.report.best_selection;
    row.feasible = out.report.feasible;
    if (out.report.best_assignment) {
        const auto clearance = clearance_time(*out.report.best_assignment, bundle.network, bundle.shelters,
                                              bundle.scenarios[scenario]);
        row.clearance_time_min = clearance.minutes;
        row.converged = clearance.converged;
    } else {
        row.error = out.report.assignment.message;
    }
    return out;
}

std::vector<ScenarioResultRow> run_scenarios(const ProblemBundle& bundle, std::uint64_t seed, bool parallel) {
    auto run_one = [&](std::size_t s) {
        try {
            return solve_scenario(bundle, s, seed).row;
        } catch (const std::exception& e) {
            ScenarioResultRow row;
            row.scenario = bundle.scenarios[s].name;
            row.attraction.assign(bundle.shelters.size(), 0.0);
            row.selected.assign(bundle.shelters.size(), false);
            row.error = e.what();
            return row;
        }
    };

    std::vector<ScenarioResultRow> rows;
    rows.reserve(bundle.scenarios.size());
    if (!parallel) {
        for (std::size_t s = 0; s < bundle.scenarios.size(); ++s) rows.push_back(run_one(s));
        return rows;
    }
    std::vector<std::future<ScenarioResultRow>> pending;
    for (std::size_t s = 0; s < bundle.scenarios.size(); ++s)
        pending.push_back(std::async(std::launch::async, run_one, s));
    for (auto& f : pending) rows.push_back(f.get());
    return rows;
}

}  // namespace evac
