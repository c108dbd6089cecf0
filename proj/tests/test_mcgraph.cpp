#include <gtest/gtest.h>

#include <sstream>

#include <cqd/cqd.hpp>

#include "test_util.hpp"

using namespace cqd;

namespace {

Schema r_schema() { return parse_schema("R/2"); }
Schema rl_schema() { return parse_schema("R/2 L/1"); }

const MCGraph& r_graph() {
    static const MCGraph g = build_mc_graph(r_schema(), 0);
    return g;
}

// The arity-2 graph over {R/2, L/1}; shared because construction dominates
// the suite's runtime.
const MCGraph& rl2_graph() {
    static const MCGraph g = build_mc_graph(rl_schema(), 2);
    return g;
}

std::vector<std::vector<int>> all_pairs_distances(const MCGraph& g) {
    const std::size_t n = g.nodes.size();
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (const auto& [u, v] : g.edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<std::size_t> frontier{s};
        dist[s][s] = 0;
        while (!frontier.empty()) {
            std::vector<std::size_t> next;
            for (std::size_t u : frontier)
                for (std::uint32_t w : adj[u])
                    if (dist[s][w] < 0) {
                        dist[s][w] = dist[s][u] + 1;
                        next.push_back(w);
                    }
            frontier = std::move(next);
        }
    }
    return dist;
}

std::set<std::string> node_set(const MCGraph& g) {
    return {g.nodes.begin(), g.nodes.end()};
}

}  // namespace

TEST(TopQueries, TwoAtomBodyCoresToOneAtom) {
    auto tops = top_queries({"R"}, r_schema(), 0);
    ASSERT_EQ(tops.size(), 1u);
    EXPECT_EQ(render(tops[0]), canonicalize(parse_query("() <- R(x, y)")));
}

TEST(TopQueries, UnaryRelationArityOne) {
    auto tops = top_queries({"L"}, rl_schema(), 1);
    ASSERT_EQ(tops.size(), 1u);
    EXPECT_EQ(render(tops[0]), canonicalize(parse_query("(x) <- L(x)")));
}

TEST(TopQueries, MatchMaximalElementsOfEnumeratedPoset) {
    Schema s = r_schema();
    auto poset = testutil::enumerate_minimal_2cqs(s, 1);
    std::set<std::string> maximal;
    for (const auto& q : poset) {
        bool has_strictly_above = false;
        for (const auto& p : poset)
            if (contains(q, p) && !contains(p, q)) has_strictly_above = true;
        if (!has_strictly_above) maximal.insert(canonicalize(q));
    }
    std::set<std::string> tops;
    for (const auto& t : top_queries({"R"}, s, 1)) tops.insert(render(t));
    EXPECT_EQ(tops, maximal);
}

TEST(TopQueries, HeadRepeatsOnlyWhenForced) {
    // body variables (2) < alpha (3): heads must repeat
    auto tops = top_queries({"L"}, rl_schema(), 3);
    ASSERT_FALSE(tops.empty());
    for (const auto& t : tops) EXPECT_EQ(t.arity(), 3u);
}

TEST(TopQueries, EmptyRhoThrows) {
    EXPECT_THROW(top_queries({}, r_schema(), 0), Error);
}

TEST(BottomQuery, Construction) {
    EXPECT_EQ(canonicalize(bottom_query(rl_schema(), 2)),
              canonicalize(parse_query("(x, x) <- R(x, x), L(x)")));
    EXPECT_EQ(canonicalize(bottom_query(parse_schema("E/2"), 0)),
              canonicalize(parse_query("() <- E(x, x)")));
    EXPECT_THROW(bottom_query(Schema{}, 0), Error);
}

TEST(BottomQuery, ContainedInEveryNode) {
    const auto& g = r_graph();
    auto bottom = bottom_query(r_schema(), 0);
    for (const auto& text : g.nodes) EXPECT_TRUE(contains(bottom, parse_query(text))) << text;
    EXPECT_EQ(g.nodes[bottom_node(g)], canonicalize(bottom));
}

TEST(Build, BinaryRelationBooleanGraph) {
    const auto& g = r_graph();
    std::set<std::string> expected{
        canonicalize(parse_query("() <- R(x, y)")),
        canonicalize(parse_query("() <- R(x, y), R(y, z)")),
        canonicalize(parse_query("() <- R(x, y), R(y, x)")),
        canonicalize(parse_query("() <- R(x, x)")),
    };
    EXPECT_EQ(node_set(g), expected);
    EXPECT_EQ(g.edges.size(), 3u);
    EXPECT_TRUE(is_connected(g));
}

TEST(Build, NodeSetEqualsEnumeratedMinimalQueries) {
    auto poset = testutil::enumerate_minimal_2cqs(r_schema(), 0);
    std::set<std::string> enumerated;
    for (const auto& q : poset) enumerated.insert(canonicalize(q));
    EXPECT_EQ(node_set(r_graph()), enumerated);
}

TEST(Build, EdgesMatchDefinitionOracle) {
    const auto& g = r_graph();
    auto poset = testutil::enumerate_minimal_2cqs(r_schema(), 0);
    std::set<std::pair<std::string, std::string>> oracle;
    for (const auto& u : poset)
        for (const auto& v : poset)
            if (testutil::def_maximally_contained(v, u, poset))
                oracle.emplace(canonicalize(u), canonicalize(v));
    std::set<std::pair<std::string, std::string>> built;
    for (const auto& [u, v] : g.edges) built.emplace(g.nodes[u], g.nodes[v]);
    EXPECT_EQ(built, oracle);
}

TEST(Build, EdgeSoundnessViaMaxcont) {
    const auto& g = r_graph();
    std::set<std::pair<std::uint32_t, std::uint32_t>> edges(g.edges.begin(), g.edges.end());
    Schema s = r_schema();
    for (std::uint32_t u = 0; u < g.nodes.size(); ++u)
        for (std::uint32_t v = 0; v < g.nodes.size(); ++v) {
            if (u == v) continue;
            EXPECT_EQ(edges.contains({u, v}),
                      is_maximally_contained(parse_query(g.nodes[v]), parse_query(g.nodes[u]), s))
                << g.nodes[u] << " -> " << g.nodes[v];
        }
}

// Arity-1 graph over one binary relation: the head condition is in play.
// Node set and edge set must match the brute-force enumeration exactly.
TEST(Build, Arity1GraphMatchesEnumerationOracle) {
    Schema s = r_schema();
    auto g = build_mc_graph(s, 1);
    auto poset = testutil::enumerate_minimal_2cqs(s, 1);
    std::set<std::string> enumerated;
    for (const auto& q : poset) enumerated.insert(canonicalize(q));
    EXPECT_EQ(node_set(g), enumerated);

    std::set<std::pair<std::string, std::string>> oracle;
    for (const auto& u : poset)
        for (const auto& v : poset)
            if (testutil::def_maximally_contained(v, u, poset))
                oracle.emplace(canonicalize(u), canonicalize(v));
    std::set<std::pair<std::string, std::string>> built;
    for (const auto& [u, v] : g.edges) built.emplace(g.nodes[u], g.nodes[v]);
    EXPECT_EQ(built, oracle);
}

// Two unary relations: type-2 restrictions supply the cross-relation edges.
TEST(Build, TwoUnaryRelationsMatchEnumerationOracle) {
    Schema s = parse_schema("L/1 M/1");
    auto g = build_mc_graph(s, 1);
    auto poset = testutil::enumerate_minimal_2cqs(s, 1);
    std::set<std::string> enumerated;
    for (const auto& q : poset) enumerated.insert(canonicalize(q));
    EXPECT_EQ(node_set(g), enumerated);

    std::set<std::pair<std::string, std::string>> oracle;
    for (const auto& u : poset)
        for (const auto& v : poset)
            if (testutil::def_maximally_contained(v, u, poset))
                oracle.emplace(canonicalize(u), canonicalize(v));
    std::set<std::pair<std::string, std::string>> built;
    for (const auto& [u, v] : g.edges) built.emplace(g.nodes[u], g.nodes[v]);
    EXPECT_EQ(built, oracle);
    EXPECT_TRUE(is_connected(g));
}

TEST(Build, UniqueBottomAndClosure) {
    for (const MCGraph* g : {&r_graph(), &rl2_graph()}) {
        std::vector<bool> has_out(g->nodes.size(), false);
        for (const auto& [u, v] : g->edges) has_out[u] = true;
        EXPECT_EQ(std::count(has_out.begin(), has_out.end(), false), 1);
        EXPECT_TRUE(is_connected(*g));
    }
}

TEST(Build, ClosureSoundness) {
    const auto& g = rl2_graph();
    Schema s = rl_schema();
    // every reduced restriction of every node must itself be a node
    testutil::Rng rng(73);
    for (int i = 0; i < 40; ++i) {
        const auto& text = g.nodes[rng.below(g.nodes.size())];
        for (const auto& r : reduced_restrictions(parse_query(text), s))
            EXPECT_TRUE(g.find_node(render(r)).has_value()) << text << " -> " << render(r);
    }
    for (const auto& text : r_graph().nodes)
        for (const auto& r : reduced_restrictions(parse_query(text), r_schema()))
            EXPECT_TRUE(r_graph().find_node(render(r)).has_value());
}

TEST(Build, Deterministic) {
    auto a = build_mc_graph(r_schema(), 0);
    auto b = build_mc_graph(r_schema(), 0);
    EXPECT_EQ(a, b);
}

TEST(Build, NodeCapReportsPartialSize) {
    try {
        build_mc_graph(rl_schema(), 2, {.max_nodes = 10});
        FAIL() << "expected the node cap to fire";
    } catch (const NodeCapExceeded& e) {
        EXPECT_GE(e.partial_nodes, 10u);
    }
}

TEST(Distance, ZeroOnEquivalentInputs) {
    const auto& g = r_graph();
    EXPECT_EQ(distance(g, parse_query("() <- R(x, y)"), parse_query("() <- R(u, v)")), 0u);
}

TEST(Distance, ChainDistancesOnBooleanGraph) {
    const auto& g = r_graph();
    auto q1 = parse_query("() <- R(x, y)");
    auto q2 = parse_query("() <- R(x, y), R(y, z)");
    auto q3 = parse_query("() <- R(x, y), R(y, x)");
    auto q4 = parse_query("() <- R(x, x)");
    EXPECT_EQ(distance(g, q1, q2), 1u);
    EXPECT_EQ(distance(g, q2, q3), 1u);
    EXPECT_EQ(distance(g, q3, q4), 1u);
    EXPECT_EQ(distance(g, q1, q4), 3u);
    auto path = shortest_path(g, q1, q4);
    ASSERT_EQ(path.size(), 4u);
    EXPECT_EQ(path.front(), canonicalize(q1));
    EXPECT_EQ(path.back(), canonicalize(q4));
}

TEST(Distance, OneExactlyOnReducedRestrictionEdges) {
    const auto& g = r_graph();
    Schema s = r_schema();
    for (const auto& ut : g.nodes)
        for (const auto& vt : g.nodes) {
            if (ut == vt) continue;
            auto u = parse_query(ut);
            auto v = parse_query(vt);
            bool unit = distance(g, u, v) == 1;
            bool rr_edge = is_maximally_contained(v, u, s) || is_maximally_contained(u, v, s);
            EXPECT_EQ(unit, rr_edge) << ut << " / " << vt;
        }
}

TEST(Distance, InvariantUnderRenamingAndPadding) {
    const auto& g = rl2_graph();
    auto q1 = parse_query("(x, y) <- R(x, y), R(y, x), L(x), L(y)");
    auto q1_renamed = parse_query("(p, q) <- R(p, q), R(q, p), L(p), L(q)");
    auto q4 = parse_query("(x, x) <- R(x, x), L(x)");
    auto q4_padded = parse_query("(x, x) <- R(x, x), L(x), L(w)");  // still a 2CQ, cores to q4
    EXPECT_EQ(distance(g, q1, q4), distance(g, q1_renamed, q4_padded));
    EXPECT_EQ(distance(g, q1_renamed, q4), distance(g, q1, q4));
}

TEST(Distance, SchemaAndArityErrors) {
    const auto& g = r_graph();
    EXPECT_THROW(distance(g, parse_query("() <- T(x, y)"), parse_query("() <- R(x, y)")), Error);
    EXPECT_THROW(distance(g, parse_query("(x) <- R(x, y)"), parse_query("(x) <- R(x, x)")), Error);
    EXPECT_THROW(
        distance(g, parse_query("() <- R(x, y), R(y, z), R(z, w)"), parse_query("() <- R(x, y)")),
        Error);
}

TEST(Distance, DisconnectedAndClosureErrors) {
    // hand-built graphs exercising the two internal failure modes
    MCGraph g;
    g.schema = r_schema();
    g.arity = 0;
    g.nodes = {canonicalize(parse_query("() <- R(x, x)")), canonicalize(parse_query("() <- R(x, y)"))};
    std::sort(g.nodes.begin(), g.nodes.end());
    EXPECT_THROW(distance(g, parse_query("() <- R(x, y)"), parse_query("() <- R(x, x)")),
                 GraphDisconnected);
    MCGraph missing = g;
    missing.nodes.erase(missing.nodes.begin());
    EXPECT_THROW(distance(missing, parse_query("() <- R(x, x)"), parse_query("() <- R(x, x)")),
                 ClosureViolation);
}

// Metric axioms on every built desk-scale graph: symmetry, identity of
// indiscernibles at node granularity, positivity, triangle inequality.
TEST(Metric, AxiomsHoldOnBuiltGraphs) {
    const MCGraph r1 = build_mc_graph(r_schema(), 1);
    const MCGraph lm1 = build_mc_graph(parse_schema("L/1 M/1"), 1);
    for (const MCGraph* g : {&r_graph(), &rl2_graph(), &r1, &lm1}) {
        auto dist = all_pairs_distances(*g);
        const std::size_t n = g->nodes.size();
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                ASSERT_GE(dist[a][b], 0) << "graph must be connected";
                EXPECT_EQ(dist[a][b], dist[b][a]);
                EXPECT_EQ(dist[a][b] == 0, a == b);
            }
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c)
                    ASSERT_LE(dist[a][c], dist[a][b] + dist[b][c]);
    }
}

// Definition-level spot checks on the arity-2 graph: the witnesses that pin
// the unit edges down (or rule them out).
TEST(Metric, UnitEdgeWitnessesOnArity2Graph) {
    const auto& g = rl2_graph();
    auto q1 = parse_query("(x, y) <- R(x, y), R(y, x), L(x), L(y)");
    auto q2 = parse_query("(x, y) <- R(x, z), L(y), L(z)");
    auto q3 = parse_query("(x, y) <- R(x, x), L(x), L(y)");
    auto q4 = parse_query("(x, x) <- R(x, x), L(x)");
    for (const auto& q : {q1, q2, q3, q4})
        EXPECT_TRUE(g.find_node(canonicalize(q)).has_value()) << render(q);

    // q4 is the unique reduced restriction of q1 (both relations appear
    // twice, so only type-1 applies)
    EXPECT_EQ(distance(g, q1, q4), 1u);
    Schema s = rl_schema();
    EXPECT_TRUE(is_maximally_contained(q4, q1, s));

    // a type-3 restriction of q3 sits strictly between q4 and q3, so their
    // distance exceeds one
    auto between34 = parse_query("(x, y) <- R(x, x), R(y, z), L(x), L(y)");
    EXPECT_TRUE(g.find_node(canonicalize(between34)).has_value());
    EXPECT_TRUE(contains(q4, between34) && !contains(between34, q4));
    EXPECT_TRUE(contains(between34, q3) && !contains(q3, between34));
    EXPECT_FALSE(is_maximally_contained(q4, q3, s));
    EXPECT_GT(distance(g, q3, q4), 1u);

    // likewise between q3 and q2
    auto between23 = parse_query("(x, y) <- R(x, z), R(w, w), L(y), L(z)");
    EXPECT_TRUE(g.find_node(canonicalize(between23)).has_value());
    EXPECT_TRUE(contains(q3, between23) && !contains(between23, q3));
    EXPECT_TRUE(contains(between23, q2) && !contains(q2, between23));
    EXPECT_FALSE(is_maximally_contained(q3, q2, s));
    EXPECT_GT(distance(g, q2, q3), 1u);
}

// Sampled edge soundness on the arity-2 graph: sampled edges satisfy the
// definition of maximal containment with every node as a candidate
// intermediate; sampled non-edges fail it.
TEST(Metric, SampledEdgeSoundnessOnArity2Graph) {
    const auto& g = rl2_graph();
    std::vector<ConjunctiveQuery> nodes;
    nodes.reserve(g.nodes.size());
    for (const auto& text : g.nodes) nodes.push_back(parse_query(text));

    auto def_edge = [&](std::size_t u, std::size_t v) {
        if (!contains(nodes[v], nodes[u]) || contains(nodes[u], nodes[v])) return false;
        for (std::size_t w = 0; w < nodes.size(); ++w) {
            if (w == u || w == v) continue;
            if (contains(nodes[v], nodes[w]) && !contains(nodes[w], nodes[v]) &&
                contains(nodes[w], nodes[u]) && !contains(nodes[u], nodes[w]))
                return false;
        }
        return true;
    };

    testutil::Rng rng(79);
    std::set<std::pair<std::uint32_t, std::uint32_t>> edges(g.edges.begin(), g.edges.end());
    for (int i = 0; i < 60; ++i) {
        const auto& [u, v] = g.edges[rng.below(g.edges.size())];
        EXPECT_TRUE(def_edge(u, v)) << g.nodes[u] << " -> " << g.nodes[v];
    }
    int non_edges = 0;
    while (non_edges < 60) {
        std::uint32_t u = static_cast<std::uint32_t>(rng.below(g.nodes.size()));
        std::uint32_t v = static_cast<std::uint32_t>(rng.below(g.nodes.size()));
        if (u == v || edges.contains({u, v})) continue;
        EXPECT_FALSE(def_edge(u, v)) << g.nodes[u] << " -> " << g.nodes[v];
        ++non_edges;
    }
}

TEST(Persistence, RoundTrip) {
    const auto& g = r_graph();
    std::ostringstream out;
    save_graph(g, out);
    std::istringstream in(out.str());
    auto loaded = load_graph(in);
    EXPECT_EQ(loaded, g);

    std::ostringstream again;
    save_graph(loaded, again);
    EXPECT_EQ(out.str(), again.str());
}

TEST(Persistence, LoadedGraphAnswersSameDistances) {
    const auto& g = rl2_graph();
    std::ostringstream out;
    save_graph(g, out);
    std::istringstream in(out.str());
    auto loaded = load_graph(in);
    auto q1 = parse_query("(x, y) <- R(x, y), R(y, x), L(x), L(y)");
    auto q2 = parse_query("(x, y) <- R(x, z), L(y), L(z)");
    EXPECT_EQ(distance(loaded, q1, q2), distance(g, q1, q2));
}

TEST(Persistence, TruncatedFileRejected) {
    std::ostringstream out;
    save_graph(r_graph(), out);
    auto text = out.str();
    std::istringstream in(text.substr(0, text.size() / 2));
    EXPECT_THROW(load_graph(in), Error);
}

TEST(Persistence, HeaderMismatchRejected) {
    auto path = std::filesystem::temp_directory_path() / "cqdist-test-mismatch.txt";
    save_graph(r_graph(), path);
    EXPECT_NO_THROW(load_graph(path, r_schema(), 0));
    EXPECT_THROW(load_graph(path, r_schema(), 1), Error);
    EXPECT_THROW(load_graph(path, rl_schema(), 0), Error);
    std::filesystem::remove(path);
}

TEST(Persistence, TamperedNodeRejected) {
    std::ostringstream out;
    save_graph(r_graph(), out);
    auto text = out.str();
    auto pos = text.find("() <- R(v0, v0)");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, 15, "() <- R(v9, v0)");
    std::istringstream in(text);
    EXPECT_THROW(load_graph(in), Error);
}

TEST(Build, NullaryRelationsSupported) {
    Schema s = parse_schema("N/0 R/2");
    auto g = build_mc_graph(s, 0);
    EXPECT_TRUE(is_connected(g));
    EXPECT_EQ(g.nodes[bottom_node(g)], canonicalize(bottom_query(s, 0)));
    EXPECT_TRUE(g.find_node(canonicalize(parse_query("() <- N()"))).has_value());
    // a positive arity needs at least one relation with a variable position
    EXPECT_THROW(bottom_query(parse_schema("N/0"), 1), Error);
}

TEST(Dot, EmitsLabeledNodesAndDirectedEdges) {
    auto dot = to_dot(r_graph());
    EXPECT_NE(dot.find("digraph"), std::string::npos);
    EXPECT_NE(dot.find("[label=\"() <- R(v0, v0)\"]"), std::string::npos);
    EXPECT_NE(dot.find(" -> "), std::string::npos);
    EXPECT_EQ(to_dot(r_graph()), dot);
}
