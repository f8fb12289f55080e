#include <fstream>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "specrad/digraph.hpp"

using namespace specrad;

namespace {

nlohmann::json golden() {
    std::ifstream in(std::string(SPECRAD_FIXTURE_DIR) + "/golden_counts.json");
    return nlohmann::json::parse(in);
}

MultiDigraph from_edges(std::initializer_list<std::tuple<int, int, int>> es) {
    MultiDigraph g;
    for (auto [u, v, m] : es) g.add_edge(u, v, m);
    return g;
}

// The even digraph generated by (1,2,3,2,4,3,1,2,3,2,4,3,1).
MultiDigraph two_double_cycles() {
    return digraph_of_path({1, 2, 3, 2, 4, 3, 1, 2, 3, 2, 4, 3, 1});
}

}  // namespace

TEST(MultiDigraph, Degrees) {
    const auto g = from_edges({{1, 1, 1}, {1, 2, 3}, {2, 1, 1}});
    EXPECT_EQ(g.out_degree(1), 4);
    EXPECT_EQ(g.in_degree(1), 2);
    EXPECT_EQ(g.edge_count(), 5);
    EXPECT_EQ(g.distinct_edge_count(), 3u);
}

TEST(MultiDigraph, StrongConnectivity) {
    EXPECT_TRUE(from_edges({{1, 2, 1}, {2, 1, 1}}).strongly_connected());
    EXPECT_FALSE(from_edges({{1, 2, 1}}).strongly_connected());
    EXPECT_TRUE(from_edges({{1, 1, 2}}).strongly_connected());
}

TEST(MultiDigraph, RemoveEdge) {
    auto g = from_edges({{1, 2, 3}});
    g.remove_edge(1, 2, 2);
    EXPECT_EQ(g.multiplicity({1, 2}), 1);
    g.remove_edge(1, 2);
    EXPECT_EQ(g.distinct_edge_count(), 0u);
}

TEST(Rooted, RootMustBeAnEdge) {
    EXPECT_THROW(RootedMultiDigraph(from_edges({{1, 2, 2}}), {2, 1}), ConfigError);
    EXPECT_NO_THROW(RootedMultiDigraph(from_edges({{1, 2, 2}}), {1, 2}));
}

TEST(Paths, DigraphOfPath) {
    const auto g = digraph_of_path({1, 2, 1, 2, 1});
    EXPECT_EQ(g.multiplicity({1, 2}), 2);
    EXPECT_EQ(g.multiplicity({2, 1}), 2);
    EXPECT_TRUE(is_even_path({1, 2, 1, 2, 1}));
    EXPECT_FALSE(is_even_path({1, 2, 1}));
    EXPECT_FALSE(is_even_path({1}));
    EXPECT_TRUE(is_even_path({3, 3, 3}));
}

TEST(Paths, FigureExampleIsEven) {
    const auto g = two_double_cycles();
    EXPECT_TRUE(is_even_digraph(g));
    EXPECT_EQ(g.vertices().size(), 4u);
    EXPECT_EQ(g.edge_count(), 12);
}

TEST(Evenness, DegreeConditionAloneIsWeaker) {
    // every off-diagonal pair once: balanced with even degrees, yet no even path generates it
    MultiDigraph g;
    for (int a = 1; a <= 3; ++a)
        for (int b = 1; b <= 3; ++b)
            if (a != b) g.add_edge(a, b);
    EXPECT_TRUE(g.strongly_connected());
    EXPECT_TRUE(degree_condition(g));
    EXPECT_FALSE(all_multiplicities_even(g));
    EXPECT_FALSE(is_even_digraph(g));
    EXPECT_FALSE(has_generating_even_path(g));
    EXPECT_FALSE(has_double_cycle_partition(g));
}

TEST(Evenness, FirstExampleIsNotEven) {
    const auto g = from_edges({{1, 1, 2}, {1, 2, 2}, {2, 1, 1}});
    EXPECT_EQ(g.out_degree(1), 4);
    EXPECT_FALSE(is_even_digraph(g));
}

TEST(Decomposition, FigureExample) {
    const auto g = two_double_cycles();
    const auto cycles = double_cycle_decomposition(g);
    ASSERT_TRUE(cycles.has_value());
    EXPECT_EQ(union_of_double_cycles(*cycles), g);
    std::size_t total = 0;
    for (const auto& c : *cycles) total += 2 * c.size();
    EXPECT_EQ(total, 12u);
}

TEST(Decomposition, RootInFirstCycleAndChainShares) {
    const auto g = two_double_cycles();
    for (const auto& [e, m] : g.edges()) {
        const auto cycles = double_cycle_decomposition(g, e);
        ASSERT_TRUE(cycles.has_value());
        const auto first = cycle_edges(cycles->front());
        EXPECT_NE(std::find(first.begin(), first.end(), e), first.end());
        const auto shared = shared_vertex_counts(*cycles);
        for (std::size_t i = 1; i < shared.size(); ++i) EXPECT_GE(shared[i], 1);
    }
}

TEST(Decomposition, RejectsNonEven) {
    EXPECT_FALSE(double_cycle_decomposition(from_edges({{1, 2, 1}, {2, 1, 1}})).has_value());
}

TEST(GeneratingPaths, Goldens) {
    const auto j = golden();
    EXPECT_EQ(count_generating_paths(from_edges({{1, 2, 2}, {2, 1, 2}})),
              j.at("doubled_two_cycle_generating_paths").get<std::uint64_t>());
    MultiDigraph fig;
    for (const auto& e : j.at("two_double_cycles_edges")) fig.add_edge(e[0], e[1], e[2]);
    EXPECT_EQ(fig, two_double_cycles());
    EXPECT_EQ(count_generating_paths(fig), j.at("two_double_cycles_generating_paths").get<std::uint64_t>());
    EXPECT_LE(static_cast<double>(count_generating_paths(fig)), generating_path_bound(6, 4));
}

TEST(GeneratingPaths, Budget) {
    EXPECT_THROW(count_generating_paths(two_double_cycles(), 10), BudgetError);
}

TEST(Enumeration, GoldenPathCounts) {
    const auto j = golden().at("even_closed_paths");
    for (const auto& [key, v] : j.items()) {
        const int n = std::stoi(key.substr(0, key.find(',')));
        const int k = std::stoi(key.substr(key.find(',') + 1));
        const auto t = enumerate_even_closed_paths(n, k);
        EXPECT_EQ(t.total, v.at("total").get<std::uint64_t>()) << key;
        for (const auto& [l, c] : v.at("by_l").items())
            EXPECT_EQ(t.by_vertex_count.at(std::stoul(l)), c.get<std::uint64_t>()) << key << " l=" << l;
    }
    EXPECT_EQ(enumerate_even_closed_paths(3, 1).total, 3u);
    EXPECT_EQ(enumerate_even_closed_paths(2, 2).total, 4u);
}

TEST(Enumeration, VisitsOnlyEvenPaths) {
    std::set<Path> seen;
    enumerate_even_closed_paths(3, 2, [&](const Path& p) {
        EXPECT_TRUE(is_even_path(p));
        EXPECT_TRUE(seen.insert(p).second);
    });
    EXPECT_EQ(seen.size(), 9u);
}

TEST(Enumeration, Guard) { EXPECT_THROW(enumerate_even_closed_paths(10, 5, {}, 1e6), CapacityError); }

TEST(Census, GoldenRootedCounts) {
    const auto j = golden().at("rooted_census");
    for (const auto& [key, v] : j.items()) {
        const int n = std::stoi(key.substr(0, key.find(',')));
        const int k = std::stoi(key.substr(key.find(',') + 1));
        const auto all = enumerate_even_digraphs_by_size(n, k);
        for (const auto& [l, c] : v.items()) {
            const int li = std::stoi(l);
            const auto one = enumerate_even_digraphs(n, k, li);
            EXPECT_EQ(one.digraphs.size(), c.at("digraphs").get<std::size_t>()) << key << " l=" << l;
            EXPECT_EQ(one.labeled_count, c.at("rooted").get<std::uint64_t>()) << key << " l=" << l;
            EXPECT_EQ(all.at(static_cast<std::size_t>(li - 1)).labeled_count, one.labeled_count);
            EXPECT_TRUE(one.bound_ok);
        }
    }
}

TEST(Census, ClassesPartitionLabeledCount) {
    const auto c = enumerate_even_digraphs(4, 3, 2);
    std::uint64_t sum = 0;
    for (const auto& [key, cnt] : c.classes) sum += cnt;
    EXPECT_EQ(sum, c.labeled_count);
    EXPECT_GE(c.classes.size(), 2u);
    EXPECT_TRUE(enumerate_even_digraphs(2, 2, 3).digraphs.empty());
}

TEST(Canonical, InvariantUnderRelabeling) {
    const auto g = two_double_cycles();
    MultiDigraph h;
    const int perm[5] = {0, 3, 1, 4, 2};
    for (const auto& [e, m] : g.edges()) h.add_edge(perm[e.first], perm[e.second], m);
    EXPECT_EQ(canonical_key(g), canonical_key(h));
    EXPECT_EQ(canonical_key(RootedMultiDigraph(g, {1, 2})), canonical_key(RootedMultiDigraph(h, {3, 1})));
    EXPECT_NE(canonical_key(RootedMultiDigraph(g, {1, 2})), canonical_key(RootedMultiDigraph(g, {2, 4})));
    EXPECT_NE(canonical_key(g), canonical_key(from_edges({{1, 2, 2}, {2, 1, 2}})));
}

TEST(Bounds, Formulas) {
    EXPECT_EQ(generating_path_bound(2, 2), 2.0);
    EXPECT_EQ(generating_path_bound(3, 2), 2.0 * 24);
    EXPECT_THROW(generating_path_bound(2, 3), ConfigError);
    EXPECT_EQ(rooted_digraph_count_bound(3, 3, 2), 9.0 * 27);
    EXPECT_EQ(even_path_count_bound(3, 2, 2), 4.0 * 9);
}

TEST(Veblen, SmallExhaustive) {
    const auto j = golden().at("strongly_connected_up_to_4_vertices_8_edges");
    std::uint64_t sc = 0, even = 0, literal_only = 0;
    for_each_multidigraph(3, 6, [&](const MultiDigraph& g) {
        if (!g.strongly_connected()) return;
        ++sc;
        const bool a = has_generating_even_path(g);
        EXPECT_EQ(a, is_even_digraph(g));
        EXPECT_EQ(a, has_double_cycle_partition(g));
        EXPECT_EQ(a, double_cycle_decomposition(g).has_value());
        even += a;
        literal_only += degree_condition(g) && !all_multiplicities_even(g);
    });
    EXPECT_GT(sc, 0u);
    EXPECT_GT(even, 0u);
    EXPECT_GT(literal_only, 0u);
    EXPECT_EQ(j.at("even").get<int>(), 28);
}
