#include "evac/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace evac {

ImpedanceParameter::ImpedanceParameter(double beta) : beta_(beta) {
    if (!std::isfinite(beta) || beta <= 0.0)
        throw std::invalid_argument("impedance parameter must be finite and positive");
}

double DemandScenario::total_vehicles() const {
    double total = 0.0;
    for (const auto& [origin, vehicles] : productions) total += vehicles;
    return total;
}

std::string to_string(StepRule rule) {
    return rule == StepRule::msa ? "msa" : "exact-line-search";
}

StepRule parse_step_rule(std::string_view text) {
    if (text == "msa") return StepRule::msa;
    if (text == "exact-line-search" || text == "exact_line_search" || text == "line-search")
        return StepRule::exact_line_search;
    throw std::invalid_argument("unknown step rule '" + std::string(text) + "'");
}

void AssignmentConfig::validate() const {
    if (max_iterations < 1) throw std::invalid_argument("assignment.max_iterations must be >= 1");
    if (!(gap_tolerance > 0.0) || !std::isfinite(gap_tolerance))
        throw std::invalid_argument("assignment.gap_tolerance must be positive");
}

OdMatrix::OdMatrix(std::vector<std::size_t> rows, std::vector<std::size_t> cols, double fill)
    : origins(std::move(rows)), shelters(std::move(cols)), values(origins.size() * shelters.size(), fill) {}

double OdMatrix::row_sum(std::size_t r) const {
    double s = 0.0;
    for (std::size_t c = 0; c < cols(); ++c) s += at(r, c);
    return s;
}

double OdMatrix::col_sum(std::size_t c) const {
    double s = 0.0;
    for (std::size_t r = 0; r < rows(); ++r) s += at(r, c);
    return s;
}

double AssignmentResult::attraction(std::size_t shelter) const {
    auto it = std::find(od_flows.shelters.begin(), od_flows.shelters.end(), shelter);
    if (it == od_flows.shelters.end()) return 0.0;
    return od_flows.col_sum(static_cast<std::size_t>(it - od_flows.shelters.begin()));
}

OdMatrix logit_distribution(std::span<const double> productions, const OdMatrix& costs,
                            ImpedanceParameter impedance, std::span<const std::string> origin_labels) {
    if (productions.size() != costs.rows())
        throw std::invalid_argument("logit_distribution: productions/costs row mismatch");
    const double beta = impedance.value();
    OdMatrix flows(costs.origins, costs.shelters);
    std::vector<double> weight(costs.cols());
    for (std::size_t r = 0; r < costs.rows(); ++r) {
        const double demand = productions[r];
        if (demand == 0.0) continue;
        double cheapest = kUnreachable;
        for (std::size_t c = 0; c < costs.cols(); ++c) cheapest = std::min(cheapest, costs.at(r, c));
        if (cheapest == kUnreachable) {
            std::string label = r < origin_labels.size() ? origin_labels[r]
                                                          : "row " + std::to_string(r);
            throw InfeasibleOriginError(label, "origin '" + label +
                                                   "' has positive production but no reachable open shelter");
        }
        double total = 0.0;
        for (std::size_t c = 0; c < costs.cols(); ++c) {
            const double cost = costs.at(r, c);
            weight[c] = cost == kUnreachable ? 0.0 : std::exp(-beta * (cost - cheapest));
            total += weight[c];
        }
        for (std::size_t c = 0; c < costs.cols(); ++c) flows.at(r, c) = demand * weight[c] / total;
    }
    return flows;
}

namespace {

std::vector<std::uint8_t> terminal_mask(const Network& network, std::span<const std::size_t> shelters) {
    std::vector<std::uint8_t> mask(network.node_count(), 0);
    for (std::size_t s : shelters) mask.at(s) = 1;
    return mask;
}

struct PathStage {
    std::vector<ShortestPathTree> trees;  // one per origin row
    OdMatrix costs;
};

PathStage shortest_paths(const Network& network, const std::vector<std::size_t>& origins,
                         const std::vector<std::size_t>& shelters, std::span<const std::uint8_t> terminal,
                         std::span<const double> link_times) {
    PathStage stage{{}, OdMatrix(origins, shelters, kUnreachable)};
    stage.trees.reserve(origins.size());
    for (std::size_t r = 0; r < origins.size(); ++r) {
        stage.trees.push_back(shortest_path_tree(network, link_times, origins[r], terminal));
        const auto& tree = stage.trees.back();
        for (std::size_t c = 0; c < shelters.size(); ++c) stage.costs.at(r, c) = tree.cost[shelters[c]];
    }
    return stage;
}

std::vector<double> load_on_trees(const Network& network, const std::vector<ShortestPathTree>& trees,
                                  const OdMatrix& od_flows) {
    std::vector<double> flows(network.link_count(), 0.0);
    for (std::size_t r = 0; r < od_flows.rows(); ++r) {
        const auto& tree = trees[r];
        for (std::size_t c = 0; c < od_flows.cols(); ++c) {
            const double q = od_flows.at(r, c);
            if (q == 0.0) continue;
            std::size_t node = od_flows.shelters[c];
            if (!tree.reachable(node))
                throw AssignmentError("no path from '" + network.nodes()[od_flows.origins[r]].id +
                                      "' to '" + network.nodes()[node].id + "' for positive flow");
            while (node != tree.origin) {
                flows[tree.predecessor[node]] += q;
                node = tree.parent[node];
            }
        }
    }
    return flows;
}

std::vector<double> congested_times(const Network& network, std::span<const double> flows) {
    std::vector<double> times(network.link_count());
    for (std::size_t a = 0; a < network.link_count(); ++a) {
        const Link& link = network.links()[a];
        times[a] = bpr_time(link.free_flow_time, link.capacity, flows[a]);
    }
    return times;
}

double entropy_term(double q) { return q > 0.0 ? q * (std::log(q) - 1.0) : 0.0; }

/// Minimizes the lower-level objective on the segment from (flows, od) towards
/// (aux_flows, aux_od) by bisection on its derivative, which is monotone.
double line_search(const Network& network, std::span<const double> flows,
                   std::span<const double> aux_flows, std::span<const double> od,
                   std::span<const double> aux_od, double beta) {
    auto slope = [&](double step) {
        double s = 0.0;
        for (std::size_t a = 0; a < flows.size(); ++a) {
            const double d = aux_flows[a] - flows[a];
            if (d == 0.0) continue;
            const Link& link = network.links()[a];
            const double v = std::max(flows[a] + step * d, 0.0);
            s += bpr_time(link.free_flow_time, link.capacity, v) * d;
        }
        for (std::size_t k = 0; k < od.size(); ++k) {
            const double e = aux_od[k] - od[k];
            if (e == 0.0) continue;
            const double q = od[k] + step * e;
            s += (q > 0.0 ? std::log(q) : -1e300) * e / beta;
        }
        return s;
    };

    if (slope(1.0) <= 0.0) return 1.0;
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (slope(mid) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

struct ResolvedDemand {
    std::vector<std::size_t> origins;
    std::vector<std::string> labels;
    std::vector<double> productions;
};

ResolvedDemand resolve_demand(const Network& network, const DemandScenario& demand) {
    ResolvedDemand out;
    std::unordered_set<std::size_t> seen;
    for (const auto& [id, vehicles] : demand.productions) {
        auto node = network.find_node(id);
        if (!node) throw AssignmentError("scenario '" + demand.name + "': unknown origin '" + id + "'");
        if (network.nodes()[*node].kind != NodeKind::origin)
            throw AssignmentError("scenario '" + demand.name + "': node '" + id + "' is not an origin");
        if (!std::isfinite(vehicles) || vehicles < 0.0)
            throw AssignmentError("scenario '" + demand.name + "': negative production at '" + id + "'");
        if (!seen.insert(*node).second)
            throw AssignmentError("scenario '" + demand.name + "': duplicate origin '" + id + "'");
        out.origins.push_back(*node);
        out.labels.push_back(id);
        out.productions.push_back(vehicles);
    }
    return out;
}

}  // namespace

std::vector<double> all_or_nothing(const Network& network, const OdMatrix& od_flows,
                                   std::span<const double> link_times) {
    const auto terminal = terminal_mask(network, od_flows.shelters);
    auto stage = shortest_paths(network, od_flows.origins, od_flows.shelters, terminal, link_times);
    return load_on_trees(network, stage.trees, od_flows);
}

double relative_gap(std::span<const double> link_times, std::span<const double> current,
                    std::span<const double> auxiliary) {
    double total = 0.0;
    double aux_total = 0.0;
    for (std::size_t a = 0; a < link_times.size(); ++a) {
        total += link_times[a] * current[a];
        aux_total += link_times[a] * auxiliary[a];
    }
    if (total == 0.0) return 0.0;
    return std::abs(total - aux_total) / total;
}

AssignmentResult solve_lower_level(const Network& network, std::span<const std::size_t> open_shelters,
                                   const DemandScenario& demand, ImpedanceParameter impedance,
                                   const AssignmentConfig& config) {
    config.validate();
    if (open_shelters.empty()) throw AssignmentError("solve_lower_level: no open shelters");
    for (std::size_t s : open_shelters)
        if (s >= network.node_count()) throw AssignmentError("solve_lower_level: shelter index out of range");

    const ResolvedDemand od = resolve_demand(network, demand);
    const std::vector<std::size_t> shelters(open_shelters.begin(), open_shelters.end());
    const auto terminal = terminal_mask(network, shelters);
    const double beta = impedance.value();

    // Start from an all-or-nothing loading at free-flow times.
    std::vector<double> times = network.free_flow_times();
    PathStage stage = shortest_paths(network, od.origins, shelters, terminal, times);
    OdMatrix od_flows = logit_distribution(od.productions, stage.costs, impedance, od.labels);
    std::vector<double> flows = load_on_trees(network, stage.trees, od_flows);

    AssignmentResult result;
    for (std::size_t k = 1;; ++k) {
        times = congested_times(network, flows);
        stage = shortest_paths(network, od.origins, shelters, terminal, times);
        const OdMatrix aux_od = logit_distribution(od.productions, stage.costs, impedance, od.labels);
        const std::vector<double> aux_flows = load_on_trees(network, stage.trees, aux_od);

        result.relative_gap = relative_gap(times, flows, aux_flows);
        result.iterations = k;
        if (config.record_trees)
            result.aon_trees.push_back(stage.trees);
        result.converged = result.relative_gap <= config.gap_tolerance;
        if (result.converged || k == config.max_iterations) break;

        const double step = config.step_rule == StepRule::msa
                                ? 1.0 / static_cast<double>(k + 1)
                                : line_search(network, flows, aux_flows, od_flows.values, aux_od.values, beta);
        for (std::size_t a = 0; a < flows.size(); ++a)
            flows[a] = std::max(flows[a] + step * (aux_flows[a] - flows[a]), 0.0);
        for (std::size_t i = 0; i < od_flows.values.size(); ++i)
            od_flows.values[i] = std::max(od_flows.values[i] + step * (aux_od.values[i] - od_flows.values[i]), 0.0);
    }

    if (!config.record_trees) result.aon_trees.push_back(std::move(stage.trees));
    result.od_costs = std::move(stage.costs);
    result.od_flows = std::move(od_flows);
    result.link_flows = std::move(flows);
    result.link_times = std::move(times);
    return result;
}

double lower_level_objective(const Network& network, std::span<const double> link_flows,
                             const OdMatrix& od_flows, ImpedanceParameter impedance) {
    double integral = 0.0;
    for (std::size_t a = 0; a < network.link_count(); ++a) {
        const Link& link = network.links()[a];
        integral += bpr_integral(link.free_flow_time, link.capacity, link_flows[a]);
    }
    double entropy = 0.0;
    for (double q : od_flows.values) entropy += entropy_term(q);
    return integral + entropy / impedance.value();
}

double lower_level_objective(const Network& network, const AssignmentResult& result,
                             ImpedanceParameter impedance) {
    return lower_level_objective(network, result.link_flows, result.od_flows, impedance);
}

double total_evacuation_time(const Network& network, std::span<const double> link_flows) {
    double total = 0.0;
    for (std::size_t a = 0; a < network.link_count(); ++a) {
        const Link& link = network.links()[a];
        total += link_flows[a] * bpr_time(link.free_flow_time, link.capacity, link_flows[a]);
    }
    return total;
}

double total_evacuation_time(const Network& network, const AssignmentResult& result) {
    return total_evacuation_time(network, result.link_flows);
}

double ConstraintViolations::total_shelter_excess() const {
    return std::accumulate(shelter_excess.begin(), shelter_excess.end(), 0.0);
}

double ConstraintViolations::total_link_excess() const {
    return std::accumulate(link_excess.begin(), link_excess.end(), 0.0);
}

ConstraintViolations constraint_violations(const Network& network, const ShelterSet& shelters,
                                           const Selection& selection, const AssignmentResult& result) {
    if (selection.size() != shelters.size())
        throw std::invalid_argument("selection length does not match the number of candidates");
    ConstraintViolations v;
    v.shelter_excess.resize(shelters.size(), 0.0);
    for (std::size_t j = 0; j < shelters.size(); ++j) {
        const std::size_t node = network.node_index(shelters.candidates[j].node_id);
        const double limit = selection[j] ? shelters.candidates[j].capacity : 0.0;
        v.shelter_excess[j] = std::max(result.attraction(node) - limit, 0.0);
    }
    v.link_excess.resize(network.link_count(), 0.0);
    for (std::size_t a = 0; a < network.link_count(); ++a) {
        const Link& link = network.links()[a];
        v.link_excess[a] = std::max(result.link_flows[a] - link.max_saturation * link.capacity, 0.0);
    }
    return v;
}

std::vector<std::size_t> open_shelter_nodes(const Network& network, const ShelterSet& shelters,
                                            const Selection& selection) {
    if (selection.size() != shelters.size())
        throw std::invalid_argument("selection length does not match the number of candidates");
    std::vector<std::size_t> open;
    for (std::size_t j = 0; j < shelters.size(); ++j)
        if (selection[j]) open.push_back(network.node_index(shelters.candidates[j].node_id));
    return open;
}

}  // namespace evac
