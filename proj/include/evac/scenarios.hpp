#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evac/ga.hpp"
#include "evac/problem_io.hpp"

namespace evac {

struct ClearanceEstimate {
    double minutes = 0.0;
    /// False when the assignment it was computed from did not converge.
    bool converged = true;
};

/// Model-defined clearance time: for each open shelter, the hours needed to
/// admit its attracted demand through min(K_j, inflow capacity) plus the
/// longest equilibrium route cost of any origin sending flow to it; the
/// maximum over shelters, rounded up to a multiple of 5 minutes.
ClearanceEstimate clearance_time(const AssignmentResult& result, const Network& network,
                                 const ShelterSet& shelters, const DemandScenario& demand);

/// One line of the scenario study.
struct ScenarioResultRow {
    std::string scenario;
    std::vector<double> attraction;  // per candidate, vph; 0 when closed
    double total_travel_time_min = 0.0;  // veh-min
    double total_travel_time_h = 0.0;    // veh-h
    double clearance_time_min = 0.0;     // model-defined estimate
    Selection selected;
    bool feasible = false;
    bool converged = true;
    std::string error;  // non-empty if the scenario could not be solved

    bool operator==(const ScenarioResultRow&) const = default;
};

struct ScenarioOutcome {
    ScenarioResultRow row;
    SolveReport report;
};

/// Solves one scenario of the bundle with the bundle's GA settings and `seed`.
ScenarioOutcome solve_scenario(const ProblemBundle& bundle, std::size_t scenario, std::uint64_t seed);

/// One independent bi-level solve per scenario, rows in input order. A
/// scenario that throws is reported in its row; the others still run.
std::vector<ScenarioResultRow> run_scenarios(const ProblemBundle& bundle, std::uint64_t seed,
                                             bool parallel = false);

}  // namespace evac
