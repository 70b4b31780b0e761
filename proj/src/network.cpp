#include "evac/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <unordered_set>

namespace evac {

std::string to_string(NodeKind kind) {
    switch (kind) {
    case NodeKind::origin: return "origin";
    case NodeKind::shelter_candidate: return "shelter";
    case NodeKind::intermediate: return "intermediate";
    }
    return "intermediate";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) {
    if (text == "origin") return NodeKind::origin;
    if (text == "shelter" || text == "shelter-candidate" || text == "shelter_candidate")
        return NodeKind::shelter_candidate;
    if (text == "intermediate") return NodeKind::intermediate;
    return std::nullopt;
}

namespace {

void build_csr(std::size_t node_count, const std::vector<std::size_t>& key,
               std::vector<std::size_t>& offsets, std::vector<std::size_t>& items) {
    offsets.assign(node_count + 1, 0);
    for (std::size_t k : key)
        if (k != kNoIndex) ++offsets[k + 1];
    for (std::size_t n = 0; n < node_count; ++n) offsets[n + 1] += offsets[n];
    items.assign(offsets.back(), 0);
    std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
    for (std::size_t l = 0; l < key.size(); ++l)
        if (key[l] != kNoIndex) items[fill[key[l]]++] = l;
}

}  // namespace

Network::Network(std::vector<Node> nodes, std::vector<Link> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
    for (std::size_t n = 0; n < nodes_.size(); ++n) node_lookup_.emplace(nodes_[n].id, n);
    for (std::size_t l = 0; l < links_.size(); ++l) link_lookup_.emplace(links_[l].id, l);

    tail_.resize(links_.size(), kNoIndex);
    head_.resize(links_.size(), kNoIndex);
    for (std::size_t l = 0; l < links_.size(); ++l) {
        auto from = find_node(links_[l].from);
        auto to = find_node(links_[l].to);
        if (from && to) {
            tail_[l] = *from;
            head_[l] = *to;
        }
    }
    build_csr(nodes_.size(), tail_, out_offsets_, out_);
    build_csr(nodes_.size(), head_, in_offsets_, in_);
}

std::optional<std::size_t> Network::find_node(std::string_view id) const {
    auto it = node_lookup_.find(std::string(id));
    if (it == node_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> Network::find_link(std::string_view id) const {
    auto it = link_lookup_.find(std::string(id));
    if (it == link_lookup_.end()) return std::nullopt;
    return it->second;
}

std::size_t Network::node_index(std::string_view id) const {
    auto n = find_node(id);
    if (!n) throw NetworkError("unknown node '" + std::string(id) + "'");
    return *n;
}

std::span<const std::size_t> Network::out_links(std::size_t node) const {
    return {out_.data() + out_offsets_[node], out_offsets_[node + 1] - out_offsets_[node]};
}

std::span<const std::size_t> Network::in_links(std::size_t node) const {
    return {in_.data() + in_offsets_[node], in_offsets_[node + 1] - in_offsets_[node]};
}

std::vector<double> Network::free_flow_times() const {
    std::vector<double> times(links_.size());
    std::transform(links_.begin(), links_.end(), times.begin(),
                   [](const Link& l) { return l.free_flow_time; });
    return times;
}

namespace {

void check_bpr_args(double free_flow_time, double capacity, double flow) {
    if (!std::isfinite(free_flow_time) || free_flow_time <= 0.0)
        throw std::invalid_argument("bpr: free-flow time must be finite and positive");
    if (!std::isfinite(capacity) || capacity <= 0.0)
        throw std::invalid_argument("bpr: capacity must be finite and positive");
    if (!std::isfinite(flow) || flow < 0.0)
        throw std::invalid_argument("bpr: flow must be finite and non-negative");
}

}  // namespace

double bpr_time(double free_flow_time, double capacity, double flow) {
    check_bpr_args(free_flow_time, capacity, flow);
    const double x = flow / capacity;
    const double x2 = x * x;
    return free_flow_time * (1.0 + 0.15 * x2 * x2);
}

double bpr_integral(double free_flow_time, double capacity, double flow) {
    check_bpr_args(free_flow_time, capacity, flow);
    const double x = flow / capacity;
    const double x2 = x * x;
    return free_flow_time * flow * (1.0 + 0.03 * x2 * x2);
}

double free_flow_time_from_length(double length_mi, double speed_mph) {
    if (!std::isfinite(length_mi) || length_mi <= 0.0)
        throw std::invalid_argument("link length must be finite and positive");
    if (!std::isfinite(speed_mph) || speed_mph <= 0.0)
        throw std::invalid_argument("speed must be finite and positive");
    return 60.0 * length_mi / speed_mph;
}

std::vector<std::size_t> ShortestPathTree::path_to(std::size_t node) const {
    std::vector<std::size_t> path;
    if (!reachable(node)) return path;
    while (node != origin) {
        path.push_back(predecessor[node]);
        node = parent[node];
    }
    std::reverse(path.begin(), path.end());
    return path;
}

ShortestPathTree shortest_path_tree(const Network& network, std::span<const double> link_times,
                                    std::size_t origin, std::span<const std::uint8_t> terminal) {
    if (link_times.size() != network.link_count())
        throw NetworkError("shortest_path_tree: expected " + std::to_string(network.link_count()) +
                           " link times, got " + std::to_string(link_times.size()));
    if (origin >= network.node_count()) throw NetworkError("shortest_path_tree: origin out of range");
    if (!terminal.empty() && terminal.size() != network.node_count())
        throw NetworkError("shortest_path_tree: terminal mask has wrong size");

    const std::size_t n = network.node_count();
    ShortestPathTree tree;
    tree.origin = origin;
    tree.cost.assign(n, kUnreachable);
    tree.predecessor.assign(n, kNoIndex);
    tree.parent.assign(n, kNoIndex);

    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
    std::vector<bool> settled(n, false);
    tree.cost[origin] = 0.0;
    frontier.emplace(0.0, origin);

    while (!frontier.empty()) {
        auto [d, u] = frontier.top();
        frontier.pop();
        if (settled[u]) continue;
        settled[u] = true;
        if (u != origin && !terminal.empty() && terminal[u]) continue;
        for (std::size_t link : network.out_links(u)) {
            const double t = link_times[link];
            if (!(t > 0.0) || !std::isfinite(t))
                throw NetworkError("shortest_path_tree: link '" + network.links()[link].id +
                                   "' has non-positive or non-finite time");
            const std::size_t v = network.head(link);
            if (settled[v]) continue;
            const double candidate = d + t;
            if (candidate < tree.cost[v]) {
                tree.cost[v] = candidate;
                tree.predecessor[v] = link;
                tree.parent[v] = u;
                frontier.emplace(candidate, v);
            } else if (candidate == tree.cost[v] && link < tree.predecessor[v]) {
                tree.predecessor[v] = link;
                tree.parent[v] = u;
            }
        }
    }
    return tree;
}

std::string to_string(const Selection& selection) {
    std::string bits;
    bits.reserve(selection.size());
    for (bool b : selection) bits.push_back(b ? '1' : '0');
    return bits;
}

Selection parse_selection(std::string_view bits) {
    Selection selection;
    selection.reserve(bits.size());
    for (char c : bits) {
        if (c != '0' && c != '1')
            throw std::invalid_argument("selection must be a string of 0/1, got '" +
                                        std::string(bits) + "'");
        selection.push_back(c == '1');
    }
    return selection;
}

std::string ValidationReport::to_text() const {
    std::ostringstream out;
    for (const auto& f : findings) out << f.subject << ": " << f.message << '\n';
    return out.str();
}

ValidationReport validate_network(const Network& network, const ShelterSet& shelters) {
    using Category = ValidationFinding::Category;
    ValidationReport report;
    auto add = [&](Category c, const std::string& subject, std::string msg) {
        report.findings.push_back({c, subject, std::move(msg)});
    };

    std::unordered_set<std::string> seen;
    for (const auto& node : network.nodes()) {
        if (node.id.empty()) add(Category::node, node.id, "empty node id");
        if (!seen.insert(node.id).second) add(Category::node, node.id, "duplicate node id");
    }
    seen.clear();
    for (std::size_t l = 0; l < network.link_count(); ++l) {
        const Link& link = network.links()[l];
        if (!seen.insert(link.id).second) add(Category::link, link.id, "duplicate link id");
        if (!network.find_node(link.from))
            add(Category::link, link.id, "references unknown node '" + link.from + "'");
        if (!network.find_node(link.to))
            add(Category::link, link.id, "references unknown node '" + link.to + "'");
        if (link.from == link.to) add(Category::link, link.id, "self-loop");
        if (!std::isfinite(link.capacity) || link.capacity <= 0.0)
            add(Category::link, link.id, "capacity must be positive");
        if (!std::isfinite(link.free_flow_time) || link.free_flow_time <= 0.0)
            add(Category::link, link.id, "free-flow time must be positive");
        if (!std::isfinite(link.max_saturation) || link.max_saturation <= 0.0 ||
            link.max_saturation > 1.0)
            add(Category::link, link.id, "max saturation must lie in (0, 1]");
    }

    for (std::size_t n = 0; n < network.node_count(); ++n) {
        const Node& node = network.nodes()[n];
        if (node.kind == NodeKind::origin && network.out_links(n).empty())
            add(Category::node, node.id, "origin has no outgoing link");
        if (node.kind == NodeKind::shelter_candidate && network.in_links(n).empty())
            add(Category::node, node.id, "shelter candidate has no incoming link");
    }

    seen.clear();
    for (const auto& s : shelters.candidates) {
        if (!seen.insert(s.node_id).second)
            add(Category::shelter, s.node_id, "duplicate shelter candidate");
        auto n = network.find_node(s.node_id);
        if (!n)
            add(Category::shelter, s.node_id, "shelter references unknown node");
        else if (network.nodes()[*n].kind != NodeKind::shelter_candidate)
            add(Category::shelter, s.node_id, "shelter node is not of kind 'shelter'");
        if (!std::isfinite(s.capacity) || s.capacity <= 0.0)
            add(Category::shelter, s.node_id, "shelter capacity must be positive");
    }

    // Reachability on the directed graph, ignoring times.
    std::vector<bool> is_target(network.node_count(), false);
    bool any_target = false;
    for (const auto& s : shelters.candidates)
        if (auto n = network.find_node(s.node_id)) is_target[*n] = any_target = true;
    for (std::size_t o = 0; o < network.node_count(); ++o) {
        if (network.nodes()[o].kind != NodeKind::origin) continue;
        std::vector<bool> visited(network.node_count(), false);
        std::vector<std::size_t> stack{o};
        visited[o] = true;
        bool found = false;
        while (!stack.empty() && !found) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t link : network.out_links(u)) {
                const std::size_t v = network.head(link);
                if (visited[v]) continue;
                if (is_target[v]) {
                    found = true;
                    break;
                }
                visited[v] = true;
                stack.push_back(v);
            }
        }
        if (!found)
            add(Category::reachability, network.nodes()[o].id,
                any_target ? "origin cannot reach any candidate shelter"
                           : "origin cannot reach any candidate shelter (no candidates given)");
    }
    return report;
}

}  // namespace evac
