#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "evac/network.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace evac;
using support::inner;
using support::link;
using support::origin;
using support::shelter;

TEST(Bpr, Examples) {
    EXPECT_EQ(bpr_time(1.0, 1000.0, 0.0), 1.0);
    EXPECT_NEAR(bpr_time(1.0, 1000.0, 1000.0), 1.15, 1e-15);
    EXPECT_NEAR(bpr_time(2.0, 500.0, 1000.0), 6.8, 1e-12);
}

TEST(Bpr, ZeroFlowIsFreeFlowExactly) {
    for (double t0 : {0.1, 1.0, 3.7, 250.0}) EXPECT_EQ(bpr_time(t0, 733.0, 0.0), t0);
}

TEST(Bpr, AtCapacityIsExactFactor) {
    for (double t0 : {0.5, 1.0, 2.0, 3.0, 7.25}) EXPECT_EQ(bpr_time(t0, 640.0, 640.0), 1.15 * t0);
}

TEST(Bpr, StrictlyIncreasingInFlow) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double t0 = 0.1 + 20.0 * u(rng);
        const double cap = 10.0 + 2000.0 * u(rng);
        const double v1 = 3.0 * cap * u(rng);
        const double v2 = v1 + cap * u(rng);
        EXPECT_LT(bpr_time(t0, cap, v1), bpr_time(t0, cap, v2)) << t0 << ' ' << cap << ' ' << v1 << ' ' << v2;
    }
}

TEST(Bpr, IntegralMatchesClosedFormAndQuadrature) {
    EXPECT_NEAR(bpr_integral(1.0, 1000.0, 1000.0), 1030.0, 1e-9);
    // Simpson's rule on the link time.
    const double t0 = 2.5, cap = 400.0, v = 700.0;
    const int n = 2000;
    double s = bpr_time(t0, cap, 0.0) + bpr_time(t0, cap, v);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * bpr_time(t0, cap, v * k / n);
    EXPECT_NEAR(bpr_integral(t0, cap, v), s * v / (3.0 * n), 1e-8);
}

TEST(Bpr, RejectsBadArguments) {
    EXPECT_THROW(bpr_time(0.0, 1000.0, 1.0), std::invalid_argument);
    EXPECT_THROW(bpr_time(1.0, 0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(bpr_time(1.0, 1000.0, -1.0), std::invalid_argument);
    EXPECT_THROW(bpr_time(1.0, 1000.0, std::nan("")), std::invalid_argument);
}

TEST(FreeFlow, LengthConversionAt35Mph) {
    EXPECT_NEAR(free_flow_time_from_length(0.35), 0.6, 1e-12);
    EXPECT_NEAR(free_flow_time_from_length(7.0), 12.0, 1e-12);
    EXPECT_NEAR(free_flow_time_from_length(1.0, 60.0), 1.0, 1e-12);
    EXPECT_THROW(free_flow_time_from_length(0.0), std::invalid_argument);
}

TEST(ShortestPath, SingleLink) {
    Network net({origin("o"), shelter("s")}, {link("l1", "o", "s", 1000, 5)});
    const auto t = shortest_path_tree(net, std::vector<double>{5.0}, net.node_index("o"));
    EXPECT_EQ(t.cost[net.node_index("s")], 5.0);
    EXPECT_EQ(t.path_to(net.node_index("s")), std::vector<std::size_t>{0});
}

TEST(ShortestPath, OriginWithoutOutgoingLinks) {
    Network net({origin("o"), inner("a"), shelter("s")}, {link("l1", "a", "s", 1000, 1)});
    const auto t = shortest_path_tree(net, std::vector<double>{1.0}, net.node_index("o"));
    EXPECT_EQ(t.cost[net.node_index("o")], 0.0);
    EXPECT_FALSE(t.reachable(net.node_index("a")));
    EXPECT_FALSE(t.reachable(net.node_index("s")));
    EXPECT_TRUE(t.path_to(net.node_index("s")).empty());
}

TEST(ShortestPath, TriangleAgainstPathEnumeration) {
    Network net({origin("o"), inner("a"), shelter("s")},
                {link("l1", "o", "a", 1000, 2), link("l2", "a", "s", 1000, 2), link("l3", "o", "s", 1000, 5)});
    const std::vector<double> times{2.0, 2.0, 5.0};
    const auto t = shortest_path_tree(net, times, 0);
    const auto brute = oracle::brute_force_costs(net, times, 0);
    EXPECT_EQ(brute[2], 4.0);
    EXPECT_EQ(t.cost[2], brute[2]);
    EXPECT_EQ(t.path_to(2), (std::vector<std::size_t>{0, 1}));
}

TEST(ShortestPath, MissingLinkTimeIsAnError) {
    Network net({origin("o"), shelter("s")}, {link("l1", "o", "s", 1000, 5)});
    EXPECT_THROW(shortest_path_tree(net, std::vector<double>{}, 0), NetworkError);
    EXPECT_THROW(shortest_path_tree(net, std::vector<double>{-1.0}, 0), NetworkError);
}

TEST(ShortestPath, TerminalNodesAreNotExpanded) {
    Network net({origin("o"), shelter("s1"), shelter("s2")},
                {link("l1", "o", "s1", 1000, 1), link("l2", "s1", "s2", 1000, 1), link("l3", "o", "s2", 1000, 5)});
    const std::vector<double> times{1.0, 1.0, 5.0};
    const std::vector<std::uint8_t> terminal{0, 1, 1};
    EXPECT_EQ(shortest_path_tree(net, times, 0).cost[2], 2.0);
    EXPECT_EQ(shortest_path_tree(net, times, 0, terminal).cost[2], 5.0);
}

TEST(ShortestPath, EqualCostTieGoesToEarlierLink) {
    Network net({origin("o"), shelter("s")}, {link("b", "o", "s", 1000, 3), link("a", "o", "s", 1000, 3)});
    EXPECT_EQ(shortest_path_tree(net, std::vector<double>{3.0, 3.0}, 0).predecessor[1], 0u);
}

// Random graphs of at most 8 nodes: Dijkstra equals the minimum over all
// simple paths, and every tree path reproduces its cost.
TEST(ShortestPath, RandomGraphsAgainstPathEnumeration) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 3 + rng() % 6;
        std::vector<Node> nodes;
        for (std::size_t i = 0; i < n; ++i) nodes.push_back(inner("n" + std::to_string(i)));
        nodes[0].kind = NodeKind::origin;
        std::vector<Link> links;
        std::vector<double> times;
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t v = 0; v < n; ++v)
                if (u != v && rng() % 3 == 0) {
                    const double t = 0.5 + static_cast<double>(rng() % 90) / 10.0;
                    links.push_back(link("l" + std::to_string(links.size()), nodes[u].id, nodes[v].id, 1000, t));
                    times.push_back(t);
                }
        Network net(nodes, links);
        const auto tree = shortest_path_tree(net, times, 0);
        const auto brute = oracle::brute_force_costs(net, times, 0);
        for (std::size_t v = 0; v < n; ++v) {
            if (std::isinf(brute[v])) {
                EXPECT_FALSE(tree.reachable(v));
                continue;
            }
            EXPECT_NEAR(tree.cost[v], brute[v], 1e-12);
            double along = 0.0;
            for (std::size_t a : tree.path_to(v)) along += times[a];
            EXPECT_NEAR(along, tree.cost[v], 1e-12);
            // No link can still be relaxed.
            for (std::size_t a = 0; a < links.size(); ++a)
                if (tree.reachable(net.tail(a))) {
                    EXPECT_LE(tree.cost[net.head(a)], tree.cost[net.tail(a)] + times[a] + 1e-12);
                }
        }
    }
}

namespace {

Network toy_network() {
    return Network({origin("o1"), inner("a"), shelter("s1"), shelter("s2")},
                   {link("l1", "o1", "a", 1000, 1), link("l2", "a", "s1", 1000, 1), link("l3", "a", "s2", 1000, 2)});
}

ShelterSet toy_shelters() { return ShelterSet{{{"s1", 1000}, {"s2", 1000}}}; }

}  // namespace

TEST(Validation, ValidToyNetworkHasNoFindings) {
    const auto report = validate_network(toy_network(), toy_shelters());
    EXPECT_TRUE(report.ok()) << report.to_text();
}

TEST(Validation, UnknownEndpointNamesTheLink) {
    auto nodes = toy_network().nodes();
    auto links = toy_network().links();
    links.push_back(link("l9", "a", "ghost", 1000, 1));
    const auto report = validate_network(Network(nodes, links), toy_shelters());
    ASSERT_EQ(report.findings.size(), 1u) << report.to_text();
    EXPECT_EQ(report.findings[0].category, ValidationFinding::Category::link);
    EXPECT_EQ(report.findings[0].subject, "l9");
}

TEST(Validation, OriginIsolatedFromShelters) {
    auto nodes = toy_network().nodes();
    auto links = toy_network().links();
    nodes.push_back(origin("o2"));
    nodes.push_back(inner("dead"));
    links.push_back(link("l9", "o2", "dead", 1000, 1));
    const auto report = validate_network(Network(nodes, links), toy_shelters());
    ASSERT_EQ(report.findings.size(), 1u) << report.to_text();
    EXPECT_EQ(report.findings[0].category, ValidationFinding::Category::reachability);
    EXPECT_EQ(report.findings[0].subject, "o2");
}

TEST(Validation, LinkAndShelterBounds) {
    Network net({origin("o1"), shelter("s1")}, {link("l1", "o1", "s1", 0, 1, 1.5), link("l1", "o1", "o1", 10, 1)});
    const auto report = validate_network(net, ShelterSet{{{"s1", 0}, {"o1", 10}, {"s1", 5}}});
    std::map<std::string, int> by_subject;
    for (const auto& f : report.findings) ++by_subject[f.subject];
    EXPECT_EQ(by_subject["l1"], 4) << report.to_text();  // capacity, saturation, duplicate id, self-loop
    EXPECT_EQ(by_subject["s1"], 2) << report.to_text();  // capacity, duplicate
    EXPECT_EQ(by_subject["o1"], 1) << report.to_text();  // wrong kind
}

TEST(Selection, TextRoundTrip) {
    EXPECT_EQ(to_string(Selection{true, false, true}), "101");
    EXPECT_EQ(parse_selection("0110"), (Selection{false, true, true, false}));
    EXPECT_THROW(parse_selection("01a"), std::invalid_argument);
}
