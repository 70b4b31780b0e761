#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace evac {

/// Free-flow speed on main roads, used when a link is given by length only.
inline constexpr double kDefaultFreeFlowSpeedMph = 35.0;

inline constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

class NetworkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class NodeKind { origin, shelter_candidate, intermediate };

std::string to_string(NodeKind kind);
/// Accepts "origin", "shelter" / "shelter-candidate", "intermediate".
std::optional<NodeKind> parse_node_kind(std::string_view text);

struct Node {
    std::string id;
    NodeKind kind = NodeKind::intermediate;
};

struct Link {
    std::string id;
    std::string from;
    std::string to;
    double capacity = 0.0;        // vehicles per hour
    double free_flow_time = 0.0;  // minutes
    double max_saturation = 1.0;  // fraction of capacity
};

/// Directed road network. Construction never throws on bad cross references;
/// unresolved endpoints are kept as kNoIndex and reported by validate_network.
class Network {
public:
    Network() = default;
    Network(std::vector<Node> nodes, std::vector<Link> links);

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Link>& links() const { return links_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t link_count() const { return links_.size(); }

    std::optional<std::size_t> find_node(std::string_view id) const;
    std::optional<std::size_t> find_link(std::string_view id) const;
    std::size_t node_index(std::string_view id) const;  // throws NetworkError

    std::size_t tail(std::size_t link) const { return tail_[link]; }
    std::size_t head(std::size_t link) const { return head_[link]; }
    /// Resolved outgoing links of a node, in declaration order.
    std::span<const std::size_t> out_links(std::size_t node) const;
    std::span<const std::size_t> in_links(std::size_t node) const;

    std::vector<double> free_flow_times() const;

private:
    std::vector<Node> nodes_;
    std::vector<Link> links_;
    std::unordered_map<std::string, std::size_t> node_lookup_;
    std::unordered_map<std::string, std::size_t> link_lookup_;
    std::vector<std::size_t> tail_;
    std::vector<std::size_t> head_;
    std::vector<std::size_t> out_offsets_, out_;
    std::vector<std::size_t> in_offsets_, in_;
};

/// t0 * (1 + 0.15 (V/C)^4). Throws std::invalid_argument on non-finite,
/// non-positive free-flow time or capacity, or negative flow.
double bpr_time(double free_flow_time, double capacity, double flow);

/// Closed-form integral of bpr_time from 0 to flow.
double bpr_integral(double free_flow_time, double capacity, double flow);

/// Minutes needed to drive length_mi at speed_mph.
double free_flow_time_from_length(double length_mi, double speed_mph = kDefaultFreeFlowSpeedMph);

struct ShortestPathTree {
    std::size_t origin = kNoIndex;
    std::vector<double> cost;              // per node; kUnreachable if not reached
    std::vector<std::size_t> predecessor;  // incoming tree link per node, or kNoIndex
    std::vector<std::size_t> parent;       // tail node of that link, or kNoIndex

    bool reachable(std::size_t node) const { return cost[node] != kUnreachable; }
    /// Links of the tree path origin -> node, in travel order.
    std::vector<std::size_t> path_to(std::size_t node) const;

    bool operator==(const ShortestPathTree&) const = default;
};

/// Dijkstra from origin over link_times (indexed by link). Ties on equal
/// cost go to the lower link index. Nodes flagged in `terminal` are reached
/// but never expanded, unless they are the origin.
ShortestPathTree shortest_path_tree(const Network& network, std::span<const double> link_times,
                                    std::size_t origin, std::span<const std::uint8_t> terminal = {});

struct ShelterCandidate {
    std::string node_id;
    double capacity = 0.0;  // vph
};

/// Candidate shelters with capacities. The selection bit vector lives with
/// the caller (GA chromosome, enumeration subset).
struct ShelterSet {
    std::vector<ShelterCandidate> candidates;
    std::size_t size() const { return candidates.size(); }
};

using Selection = std::vector<bool>;

std::string to_string(const Selection& selection);
Selection parse_selection(std::string_view bits);

struct ValidationFinding {
    enum class Category { node, link, shelter, reachability };
    Category category;
    std::string subject;  // offending node / link / shelter id
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationFinding> findings;
    bool ok() const { return findings.empty(); }
    std::string to_text() const;
};

/// Checks node/link invariants, shelter cross references and that every
/// origin reaches at least one candidate shelter.
ValidationReport validate_network(const Network& network, const ShelterSet& shelters);

}  // namespace evac
