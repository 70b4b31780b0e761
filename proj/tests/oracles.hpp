#pragma once

// Reference computations used by the tests. They work on route lists built
// by depth-first enumeration and share no code with the library solvers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "evac/assignment.hpp"
#include "evac/network.hpp"

namespace oracle {

inline double bpr(double t0, double cap, double v) { return t0 * (1.0 + 0.15 * std::pow(v / cap, 4)); }

struct Route {
    std::size_t shelter = 0;         // position in the open-shelter list
    std::vector<std::size_t> links;  // link indices in travel order
};

inline std::size_t node_of(const evac::Network& net, const std::string& id) {
    for (std::size_t n = 0; n < net.node_count(); ++n)
        if (net.nodes()[n].id == id) return n;
    return evac::kNoIndex;
}

// Every simple path from `origin`; a path ends when it reaches a node in
// `stops` and never passes through one.
inline void enumerate_paths(const evac::Network& net, std::size_t origin, const std::vector<std::size_t>& stops,
                            std::vector<std::pair<std::size_t, std::vector<std::size_t>>>& out) {
    std::vector<std::size_t> path;
    std::vector<bool> on_path(net.node_count(), false);
    auto dfs = [&](auto&& self, std::size_t node) -> void {
        on_path[node] = true;
        for (std::size_t a = 0; a < net.link_count(); ++a) {
            const auto& l = net.links()[a];
            if (l.from != net.nodes()[node].id) continue;
            const std::size_t next = node_of(net, l.to);
            if (next == evac::kNoIndex || on_path[next]) continue;
            path.push_back(a);
            if (std::find(stops.begin(), stops.end(), next) != stops.end())
                out.emplace_back(next, path);
            else
                self(self, next);
            path.pop_back();
        }
        on_path[node] = false;
    };
    dfs(dfs, origin);
}

// Minimum cost from `origin` to every node over all simple paths.
inline std::vector<double> brute_force_costs(const evac::Network& net, const std::vector<double>& times,
                                             std::size_t origin) {
    std::vector<double> best(net.node_count(), std::numeric_limits<double>::infinity());
    best[origin] = 0.0;
    for (std::size_t target = 0; target < net.node_count(); ++target) {
        if (target == origin) continue;
        std::vector<std::pair<std::size_t, std::vector<std::size_t>>> paths;
        enumerate_paths(net, origin, {target}, paths);
        for (const auto& [node, links] : paths) {
            double c = 0.0;
            for (std::size_t a : links) c += times[a];
            best[node] = std::min(best[node], c);
        }
    }
    return best;
}

struct Equilibrium {
    std::vector<double> link_flows;
    std::vector<std::vector<double>> od;  // [origin][open shelter]
    std::size_t sweeps = 0;
    double residual = 0.0;
};

// Combined logit-distribution / deterministic-route equilibrium. Each
// origin's routes are equilibrated pairwise on the generalized cost
// c_r + ln(q_j) / beta, which is constant over used routes at the optimum.
inline Equilibrium route_equilibrium(const evac::Network& net, const std::vector<std::string>& open_ids,
                                     const std::vector<std::pair<std::string, double>>& productions, double beta,
                                     double tolerance = 1e-11, std::size_t max_sweeps = 2000000) {
    std::vector<std::size_t> stops;
    for (const auto& id : open_ids) stops.push_back(node_of(net, id));

    const std::size_t n_origins = productions.size();
    std::vector<std::vector<Route>> routes(n_origins);
    for (std::size_t i = 0; i < n_origins; ++i) {
        std::vector<std::pair<std::size_t, std::vector<std::size_t>>> paths;
        enumerate_paths(net, node_of(net, productions[i].first), stops, paths);
        for (auto& [node, links] : paths) {
            const auto pos = static_cast<std::size_t>(std::find(stops.begin(), stops.end(), node) - stops.begin());
            routes[i].push_back({pos, std::move(links)});
        }
    }

    std::vector<std::vector<double>> f(n_origins);
    Equilibrium eq;
    eq.link_flows.assign(net.link_count(), 0.0);
    eq.od.assign(n_origins, std::vector<double>(stops.size(), 0.0));
    for (std::size_t i = 0; i < n_origins; ++i) {
        const double share = productions[i].second / static_cast<double>(routes[i].size());
        f[i].assign(routes[i].size(), share);
        for (const auto& r : routes[i]) {
            eq.od[i][r.shelter] += share;
            for (std::size_t a : r.links) eq.link_flows[a] += share;
        }
    }

    auto route_cost = [&](const Route& r) {
        double c = 0.0;
        for (std::size_t a : r.links) {
            const auto& l = net.links()[a];
            c += bpr(l.free_flow_time, l.capacity, std::max(eq.link_flows[a], 0.0));
        }
        return c;
    };
    auto generalized = [&](std::size_t i, std::size_t r) {
        const double q = eq.od[i][routes[i][r].shelter];
        return route_cost(routes[i][r]) + (q > 0.0 ? std::log(q) : -1e300) / beta;
    };
    auto shift = [&](std::size_t i, std::size_t from, std::size_t to, double amount) {
        f[i][from] -= amount;
        f[i][to] += amount;
        eq.od[i][routes[i][from].shelter] -= amount;
        eq.od[i][routes[i][to].shelter] += amount;
        for (std::size_t a : routes[i][from].links) eq.link_flows[a] -= amount;
        for (std::size_t a : routes[i][to].links) eq.link_flows[a] += amount;
    };

    for (eq.sweeps = 0; eq.sweeps < max_sweeps; ++eq.sweeps) {
        eq.residual = 0.0;
        for (std::size_t i = 0; i < n_origins; ++i) {
            if (productions[i].second <= 0.0 || routes[i].size() < 2) continue;
            std::size_t hi = 0, lo = 0;
            double g_hi = -std::numeric_limits<double>::infinity();
            double g_lo = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < routes[i].size(); ++r) {
                const double g = generalized(i, r);
                if (f[i][r] > 0.0 && g > g_hi) { g_hi = g; hi = r; }
                if (g < g_lo) { g_lo = g; lo = r; }
            }
            const double spread = (g_hi - g_lo) / std::max(1.0, std::abs(g_hi));
            eq.residual = std::max(eq.residual, spread);
            if (hi == lo || spread <= tolerance) continue;

            const double available = f[i][hi];
            shift(i, hi, lo, available);
            const double h_all = generalized(i, hi) - generalized(i, lo);
            shift(i, lo, hi, available);
            if (h_all >= 0.0) {
                shift(i, hi, lo, available);
                f[i][hi] = 0.0;
                continue;
            }
            double a = 0.0, b = available;
            for (int it = 0; it < 200 && b - a > 1e-15 * available; ++it) {
                const double mid = 0.5 * (a + b);
                shift(i, hi, lo, mid);
                const double h = generalized(i, hi) - generalized(i, lo);
                shift(i, lo, hi, mid);
                if (h > 0.0) a = mid; else b = mid;
            }
            shift(i, hi, lo, std::min(0.5 * (a + b), available));
        }
        if (eq.residual <= tolerance) break;
    }
    return eq;
}

inline std::size_t count_routes(const evac::Network& net, const std::vector<std::string>& open_ids,
                                const std::vector<std::pair<std::string, double>>& productions) {
    std::vector<std::size_t> stops;
    for (const auto& id : open_ids) stops.push_back(node_of(net, id));
    std::size_t total = 0;
    for (const auto& [origin, _] : productions) {
        std::vector<std::pair<std::size_t, std::vector<std::size_t>>> paths;
        enumerate_paths(net, node_of(net, origin), stops, paths);
        total += paths.size();
    }
    return total;
}

// Largest per-link deviation |a - b| / max(|b|, 1 vph).
inline double max_relative_deviation(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size() && k < b.size(); ++k)
        worst = std::max(worst, std::abs(a[k] - b[k]) / std::max(std::abs(b[k]), 1.0));
    return worst;
}

// Equilibrium consistency of a lower-level result: production conservation
// (1e-9 relative), shelter inflow balance per shelter and in aggregate (1e-6
// relative) and, when the gap is at most 1e-6, logit shares within 1e-2.
// Returns one message per violation.
inline std::vector<std::string> consistency_failures(const evac::Network& net, const evac::DemandScenario& demand,
                                                     const evac::AssignmentResult& result,
                                                     evac::ImpedanceParameter impedance) {
    std::vector<std::string> failures;
    auto fail = [&](const std::string& what, double got, double want) {
        std::ostringstream s;
        s.precision(17);
        s << demand.name << ": " << what << " got " << got << " want " << want;
        failures.push_back(s.str());
    };

    const auto& q = result.od_flows;
    double total = 0.0;
    for (std::size_t r = 0; r < q.rows(); ++r) {
        const std::string& id = net.nodes()[q.origins[r]].id;
        double production = 0.0;
        for (const auto& [o, v] : demand.productions)
            if (o == id) production = v;
        total += production;
        double row = 0.0;
        for (std::size_t c = 0; c < q.cols(); ++c) row += q.at(r, c);
        if (std::abs(row - production) > 1e-9 * std::max(production, 1e-300) && !(production == 0.0 && row == 0.0))
            fail("production at " + id, row, production);
    }

    double inflow_total = 0.0;
    double attracted_total = 0.0;
    for (std::size_t c = 0; c < q.cols(); ++c) {
        double attracted = 0.0;
        for (std::size_t r = 0; r < q.rows(); ++r) attracted += q.at(r, c);
        const std::string& sid = net.nodes()[q.shelters[c]].id;
        double inflow = 0.0;
        for (std::size_t a = 0; a < net.link_count(); ++a)
            if (net.links()[a].to == sid) inflow += result.link_flows[a];
        inflow_total += inflow;
        attracted_total += attracted;
        if (std::abs(inflow - attracted) > 1e-6 * std::max(attracted, 1.0)) fail("inflow at " + sid, inflow, attracted);
    }
    if (std::abs(attracted_total - total) > 1e-6 * std::max(total, 1.0))
        fail("aggregate attraction", attracted_total, total);
    if (std::abs(inflow_total - total) > 1e-6 * std::max(total, 1.0)) fail("aggregate inflow", inflow_total, total);

    if (result.relative_gap <= 1e-6) {
        const double beta = impedance.value();
        for (std::size_t r = 0; r < q.rows(); ++r) {
            double production = 0.0;
            for (std::size_t c = 0; c < q.cols(); ++c) production += q.at(r, c);
            if (production <= 0.0) continue;
            double lowest = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < q.cols(); ++c) lowest = std::min(lowest, result.od_costs.at(r, c));
            double denom = 0.0;
            for (std::size_t c = 0; c < q.cols(); ++c) denom += std::exp(-beta * (result.od_costs.at(r, c) - lowest));
            for (std::size_t c = 0; c < q.cols(); ++c) {
                const double expected = std::exp(-beta * (result.od_costs.at(r, c) - lowest)) / denom;
                const double share = q.at(r, c) / production;
                if (std::abs(share - expected) > 1e-2)
                    fail("logit share " + net.nodes()[q.origins[r]].id + "->" + net.nodes()[q.shelters[c]].id,
                         share, expected);
            }
        }
    }
    return failures;
}

}  // namespace oracle
