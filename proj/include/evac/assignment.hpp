#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "evac/network.hpp"

namespace evac {

/// Logit dispersion of shelter choice, per minute of route cost.
class ImpedanceParameter {
public:
    ImpedanceParameter() = default;
    explicit ImpedanceParameter(double beta);
    double value() const { return beta_; }
    bool operator==(const ImpedanceParameter&) const = default;

private:
    double beta_ = 10.0;
};

struct DemandScenario {
    std::string name;
    /// Origin node id -> vehicles, in file order.
    std::vector<std::pair<std::string, double>> productions;

    double total_vehicles() const;
};

enum class StepRule { msa, exact_line_search };

std::string to_string(StepRule rule);
StepRule parse_step_rule(std::string_view text);

struct AssignmentConfig {
    std::size_t max_iterations = 500;
    double gap_tolerance = 1e-5;
    StepRule step_rule = StepRule::exact_line_search;
    /// Keep every iteration's shortest-path trees, not only the final ones.
    bool record_trees = false;

    void validate() const;  // throws std::invalid_argument
    bool operator==(const AssignmentConfig&) const = default;
};

/// Dense origin x shelter table keyed by network node indices.
struct OdMatrix {
    std::vector<std::size_t> origins;
    std::vector<std::size_t> shelters;
    std::vector<double> values;  // row-major, origins.size() x shelters.size()

    OdMatrix() = default;
    OdMatrix(std::vector<std::size_t> rows, std::vector<std::size_t> cols, double fill = 0.0);

    std::size_t rows() const { return origins.size(); }
    std::size_t cols() const { return shelters.size(); }
    double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
    double row_sum(std::size_t r) const;
    double col_sum(std::size_t c) const;

    bool operator==(const OdMatrix&) const = default;
};

class AssignmentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An origin with positive production cannot reach any open shelter.
class InfeasibleOriginError : public AssignmentError {
public:
    InfeasibleOriginError(std::string origin, const std::string& what)
        : AssignmentError(what), origin_(std::move(origin)) {}
    const std::string& origin() const { return origin_; }

private:
    std::string origin_;
};

struct AssignmentResult {
    OdMatrix od_flows;  // q, vph
    OdMatrix od_costs;  // shortest-path minutes at the final link times
    std::vector<double> link_flows;  // V, vph
    std::vector<double> link_times;  // t(V), minutes
    double relative_gap = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    /// Shortest-path trees per iteration and origin row. Only the final
    /// iteration is kept unless AssignmentConfig::record_trees is set.
    std::vector<std::vector<ShortestPathTree>> aon_trees;

    /// Total flow attracted by the open shelter at node index `shelter`,
    /// zero if that node is not a column of od_flows.
    double attraction(std::size_t shelter) const;

    bool operator==(const AssignmentResult&) const = default;
};

/// q_ij = O_i exp(-beta c_ij) / sum_j' exp(-beta c_ij'). Shelters with
/// infinite cost get a zero share. `origin_labels` (optional, one per row)
/// names the origin in InfeasibleOriginError.
OdMatrix logit_distribution(std::span<const double> productions, const OdMatrix& costs,
                            ImpedanceParameter impedance,
                            std::span<const std::string> origin_labels = {});

/// Loads every O-D flow onto one shortest path at link_times. The od_flows
/// shelter nodes are terminals: paths never pass through them.
std::vector<double> all_or_nothing(const Network& network, const OdMatrix& od_flows,
                                   std::span<const double> link_times);

/// Combined shelter-choice / route-choice equilibrium over open_shelters
/// (node indices), by double-stage iteration with MSA or exact line search.
AssignmentResult solve_lower_level(const Network& network,
                                   std::span<const std::size_t> open_shelters,
                                   const DemandScenario& demand, ImpedanceParameter impedance,
                                   const AssignmentConfig& config);

/// Beckmann integral plus (1/beta) sum q (ln q - 1), with 0 (ln 0 - 1) = 0.
double lower_level_objective(const Network& network, std::span<const double> link_flows,
                             const OdMatrix& od_flows, ImpedanceParameter impedance);
double lower_level_objective(const Network& network, const AssignmentResult& result,
                             ImpedanceParameter impedance);

/// sum_a V_a t_a(V_a), vehicle-minutes.
double total_evacuation_time(const Network& network, std::span<const double> link_flows);
double total_evacuation_time(const Network& network, const AssignmentResult& result);

/// |sum t V - sum t V_aux| / sum t V at the current times; zero when the
/// current total is zero.
double relative_gap(std::span<const double> link_times, std::span<const double> current,
                    std::span<const double> auxiliary);

struct ConstraintViolations {
    std::vector<double> shelter_excess;  // per candidate, vph
    std::vector<double> link_excess;     // per link, vph

    double total_shelter_excess() const;
    double total_link_excess() const;
    bool feasible() const { return total_shelter_excess() == 0.0 && total_link_excess() == 0.0; }
};

/// max(sum_i q_ij - K_j X_j, 0) per candidate and max(V_a - p_a C_a, 0) per link.
ConstraintViolations constraint_violations(const Network& network, const ShelterSet& shelters,
                                           const Selection& selection,
                                           const AssignmentResult& result);

/// Node indices of the selected candidates, in candidate order.
std::vector<std::size_t> open_shelter_nodes(const Network& network, const ShelterSet& shelters,
                                            const Selection& selection);

}  // namespace evac
