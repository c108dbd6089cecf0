#pragma once

#include <cstdint>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <optional>

#include "parse.hpp"
#include "restrict.hpp"

namespace cqd {

class NodeCapExceeded : public Error {
public:
    explicit NodeCapExceeded(std::size_t nodes)
        : Error("node cap exceeded; partial graph has " + std::to_string(nodes) + " nodes"),
          partial_nodes(nodes) {}

    std::size_t partial_nodes;
};

class GraphDisconnected : public Error {
public:
    using Error::Error;
};

class ClosureViolation : public Error {
public:
    using Error::Error;
};

// Maximal-containment graph for a schema and arity: nodes are the canonical
// minimal 2CQs, and (u, v) is an edge exactly when u maximally contains v.
// Nodes are stored as canonical query texts in ascending order, so graphs and
// their cache files are byte-reproducible.
struct MCGraph {
    Schema schema;
    std::size_t arity = 0;
    std::vector<std::string> nodes;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

    std::optional<std::size_t> find_node(const std::string& canonical_text) const {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), canonical_text);
        if (it == nodes.end() || *it != canonical_text) return std::nullopt;
        return static_cast<std::size_t>(it - nodes.begin());
    }

    bool operator==(const MCGraph&) const = default;
};

// Cores of the queries whose body holds two all-fresh atoms per relation name
// in rho and whose head selects alpha distinct body variables in order;
// repeats appear in the head only when the body has fewer than alpha
// variables.  Deduplicated up to renaming.
inline std::vector<ConjunctiveQuery> top_queries(const std::vector<std::string>& rho,
                                                 const Schema& schema, std::size_t alpha) {
    if (rho.empty()) throw Error("empty relation set");
    std::vector<std::string> names(rho);
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());

    std::vector<Atom> body;
    std::size_t serial = 0;
    for (const auto& name : names) {
        const std::size_t ar = schema.arity(name);  // throws on unknown names
        for (int copy = 0; copy < 2; ++copy) {
            Atom a{name, {}};
            for (std::size_t i = 0; i < ar; ++i) a.args.push_back("t" + std::to_string(++serial));
            body.push_back(std::move(a));
        }
    }

    std::vector<std::string> pool;
    {
        std::set<std::string> seen;
        for (const auto& a : body)
            for (const auto& v : a.args)
                if (seen.insert(v).second) pool.push_back(v);
    }

    std::vector<std::vector<std::string>> heads;
    if (alpha == 0) {
        heads.push_back({});
    } else if (pool.empty()) {
        return {};  // nothing can appear in the head
    } else if (pool.size() >= alpha) {
        std::vector<std::string> current;
        std::vector<bool> used(pool.size(), false);
        auto rec = [&](auto&& self) -> void {
            if (current.size() == alpha) {
                heads.push_back(current);
                return;
            }
            for (std::size_t i = 0; i < pool.size(); ++i) {
                if (used[i]) continue;
                used[i] = true;
                current.push_back(pool[i]);
                self(self);
                current.pop_back();
                used[i] = false;
            }
        };
        rec(rec);
    } else {
        std::vector<std::string> current;
        auto rec = [&](auto&& self) -> void {
            if (current.size() == alpha) {
                heads.push_back(current);
                return;
            }
            for (const auto& v : pool) {
                current.push_back(v);
                self(self);
                current.pop_back();
            }
        };
        rec(rec);
    }

    std::map<std::string, ConjunctiveQuery> dedup;
    for (auto& h : heads) {
        auto cored = core(make_query(std::move(h), body));
        dedup.emplace(render(cored), std::move(cored));
    }
    std::vector<ConjunctiveQuery> out;
    out.reserve(dedup.size());
    for (auto& [text, q] : dedup) out.push_back(std::move(q));
    return out;
}

// The unique sink of the graph: a single variable x, one all-x atom per
// relation name, and alpha copies of x in the head.
inline ConjunctiveQuery bottom_query(const Schema& schema, std::size_t alpha) {
    if (schema.relations.empty()) throw Error("empty schema");
    std::vector<Atom> body;
    bool have_position = false;
    for (const auto& [name, ar] : schema.relations) {
        body.push_back({name, std::vector<std::string>(ar, "x")});
        have_position = have_position || ar > 0;
    }
    if (alpha > 0 && !have_position)
        throw Error("no bottom query: every relation is nullary but the arity is positive");
    return make_query(std::vector<std::string>(alpha, "x"), std::move(body));
}

struct BuildOptions {
    std::size_t max_nodes = 100000;
};

// Closure construction: seed with the top queries of every non-empty subset
// of the schema, then repeatedly add reduced restrictions until nothing new
// appears.  Deterministic: pending nodes expand in canonical text order.
inline MCGraph build_mc_graph(const Schema& schema, std::size_t alpha,
                              const BuildOptions& options = {}) {
    if (schema.relations.empty()) throw Error("empty schema");
    std::vector<std::string> names;
    for (const auto& [name, ar] : schema.relations) names.push_back(name);
    if (names.size() > 16) throw Error("schema too large for graph construction");

    std::map<std::string, ConjunctiveQuery> known;
    std::set<std::string> pending;
    for (std::size_t mask = 1; mask < (std::size_t{1} << names.size()); ++mask) {
        std::vector<std::string> rho;
        for (std::size_t b = 0; b < names.size(); ++b)
            if (mask & (std::size_t{1} << b)) rho.push_back(names[b]);
        for (auto& t : top_queries(rho, schema, alpha)) {
            auto text = render(t);
            if (known.emplace(text, std::move(t)).second) pending.insert(text);
        }
    }
    if (known.empty()) throw Error("no valid queries exist for this schema and arity");
    if (known.size() > options.max_nodes) throw NodeCapExceeded(known.size());

    std::set<std::pair<std::string, std::string>> text_edges;
    while (!pending.empty()) {
        auto text = *pending.begin();
        pending.erase(pending.begin());
        for (auto& r : reduced_restrictions(known.at(text), schema)) {
            auto target = render(r);
            text_edges.emplace(text, target);
            if (!known.contains(target)) {
                if (known.size() >= options.max_nodes) throw NodeCapExceeded(known.size());
                known.emplace(target, std::move(r));
                pending.insert(target);
            }
        }
    }

    MCGraph g;
    g.schema = schema;
    g.arity = alpha;
    std::map<std::string, std::uint32_t> index;
    for (const auto& [text, q] : known) {
        index.emplace(text, static_cast<std::uint32_t>(g.nodes.size()));
        g.nodes.push_back(text);
    }
    g.edges.reserve(text_edges.size());
    for (const auto& [u, v] : text_edges) g.edges.emplace_back(index.at(u), index.at(v));
    std::sort(g.edges.begin(), g.edges.end());

    std::vector<bool> has_out(g.nodes.size(), false);
    for (const auto& [u, v] : g.edges) has_out[u] = true;
    auto sinks = std::count(has_out.begin(), has_out.end(), false);
    if (sinks != 1)
        throw Error("internal: expected a unique bottom node, found " + std::to_string(sinks));
    return g;
}

inline std::size_t bottom_node(const MCGraph& g) {
    std::vector<bool> has_out(g.nodes.size(), false);
    for (const auto& [u, v] : g.edges) has_out[u] = true;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        if (!has_out[i]) return i;
    throw Error("internal: graph has no bottom node");
}

namespace detail {

inline std::vector<std::vector<std::uint32_t>> undirected_adjacency(const MCGraph& g) {
    std::vector<std::vector<std::uint32_t>> adj(g.nodes.size());
    for (const auto& [u, v] : g.edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for (auto& n : adj) {
        std::sort(n.begin(), n.end());
        n.erase(std::unique(n.begin(), n.end()), n.end());
    }
    return adj;
}

inline std::size_t locate(const MCGraph& g, const ConjunctiveQuery& q) {
    for (const auto& v : validate(q, g.schema))
        if (v.kind == Violation::Kind::Hard) throw Error("schema mismatch: " + v.message);
    if (!is_two_cq(q)) throw Error("not a 2CQ: some relation name occurs more than twice");
    if (q.arity() != g.arity)
        throw Error("arity mismatch: graph holds queries of arity " + std::to_string(g.arity) +
                    ", got " + std::to_string(q.arity()));
    auto text = render(core(q));
    auto idx = g.find_node(text);
    if (!idx) throw ClosureViolation("internal: core is not a node of the graph: " + text);
    return *idx;
}

}  // namespace detail

// Shortest undirected node sequence between the cores of q1 and q2, both
// endpoints included.  BFS visits neighbours in ascending node order, so the
// witness path is deterministic.
inline std::vector<std::string> shortest_path(const MCGraph& g, const ConjunctiveQuery& q1,
                                              const ConjunctiveQuery& q2) {
    const std::size_t source = detail::locate(g, q1);
    const std::size_t target = detail::locate(g, q2);
    const auto adj = detail::undirected_adjacency(g);

    std::vector<bool> seen(g.nodes.size(), false);
    std::vector<std::size_t> parent(g.nodes.size(), g.nodes.size());
    std::deque<std::size_t> frontier{source};
    seen[source] = true;
    while (!frontier.empty() && !seen[target]) {
        std::size_t u = frontier.front();
        frontier.pop_front();
        for (std::uint32_t w : adj[u]) {
            if (seen[w]) continue;
            seen[w] = true;
            parent[w] = u;
            frontier.push_back(w);
        }
    }
    if (!seen[target])
        throw GraphDisconnected("graph is disconnected: no path between " + g.nodes[source] +
                                " and " + g.nodes[target]);
    std::vector<std::string> path;
    for (std::size_t at = target;; at = parent[at]) {
        path.push_back(g.nodes[at]);
        if (at == source) break;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

inline std::size_t distance(const MCGraph& g, const ConjunctiveQuery& q1,
                            const ConjunctiveQuery& q2) {
    return shortest_path(g, q1, q2).size() - 1;
}

inline bool is_connected(const MCGraph& g) {
    if (g.nodes.empty()) return true;
    const auto adj = detail::undirected_adjacency(g);
    std::vector<bool> seen(g.nodes.size(), false);
    std::deque<std::size_t> frontier{0};
    seen[0] = true;
    std::size_t visited = 1;
    while (!frontier.empty()) {
        std::size_t u = frontier.front();
        frontier.pop_front();
        for (std::uint32_t w : adj[u]) {
            if (seen[w]) continue;
            seen[w] = true;
            ++visited;
            frontier.push_back(w);
        }
    }
    return visited == g.nodes.size();
}

inline void save_graph(const MCGraph& g, std::ostream& os) {
    os << "cqdist-mcgraph 1\n";
    os << "schema";
    for (const auto& [name, ar] : g.schema.relations) os << ' ' << name << '/' << ar;
    os << '\n';
    os << "arity " << g.arity << '\n';
    os << "nodes " << g.nodes.size() << '\n';
    os << "edges " << g.edges.size() << '\n';
    for (std::size_t i = 0; i < g.nodes.size(); ++i) os << "node " << i << ' ' << g.nodes[i] << '\n';
    for (const auto& [u, v] : g.edges) os << "edge " << u << ' ' << v << '\n';
}

inline void save_graph(const MCGraph& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write graph cache: " + path.string());
    save_graph(g, out);
}

inline MCGraph load_graph(std::istream& is) {
    auto fail = [](const std::string& why) -> void { throw Error("malformed graph file: " + why); };
    auto read_count = [&](std::istream& in, const std::string& key) -> std::size_t {
        std::string line;
        if (!std::getline(in, line) || line.rfind(key + " ", 0) != 0) fail("missing '" + key + "' line");
        std::size_t value = 0;
        for (std::size_t i = key.size() + 1; i < line.size(); ++i) {
            if (line[i] < '0' || line[i] > '9') fail("bad '" + key + "' value");
            value = value * 10 + static_cast<std::size_t>(line[i] - '0');
        }
        return value;
    };

    std::string line;
    if (!std::getline(is, line) || line != "cqdist-mcgraph 1") fail("bad header");
    if (!std::getline(is, line) || line.rfind("schema ", 0) != 0) fail("missing schema line");
    MCGraph g;
    g.schema = parse_schema(std::string_view(line).substr(7));
    g.arity = read_count(is, "arity");
    const std::size_t node_count = read_count(is, "nodes");
    const std::size_t edge_count = read_count(is, "edges");

    for (std::size_t i = 0; i < node_count; ++i) {
        if (!std::getline(is, line)) fail("truncated node table");
        const std::string prefix = "node " + std::to_string(i) + " ";
        if (line.rfind(prefix, 0) != 0) fail("bad node line " + std::to_string(i));
        std::string text = line.substr(prefix.size());
        if (canonicalize(parse_query(text, g.schema)) != text)
            fail("node " + std::to_string(i) + " is not a canonical query");
        g.nodes.push_back(std::move(text));
    }
    if (!std::is_sorted(g.nodes.begin(), g.nodes.end()) ||
        std::adjacent_find(g.nodes.begin(), g.nodes.end()) != g.nodes.end())
        fail("node table is not strictly sorted");

    for (std::size_t i = 0; i < edge_count; ++i) {
        if (!std::getline(is, line)) fail("truncated edge list");
        std::size_t u = 0, v = 0;
        char tag[5] = {};
        if (std::sscanf(line.c_str(), "%4s %zu %zu", tag, &u, &v) != 3 ||
            std::string(tag) != "edge" || u >= node_count || v >= node_count)
            fail("bad edge line " + std::to_string(i));
        g.edges.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
    }
    if (std::getline(is, line) && !line.empty()) fail("trailing content");
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

inline MCGraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read graph cache: " + path.string());
    return load_graph(in);
}

inline MCGraph load_graph(const std::filesystem::path& path, const Schema& expect_schema,
                          std::size_t expect_arity) {
    MCGraph g = load_graph(path);
    if (g.schema.relations != expect_schema.relations || g.arity != expect_arity)
        throw Error("graph cache header mismatch: " + path.string());
    return g;
}

inline std::string to_dot(const MCGraph& g) {
    auto escape = [](const std::string& s) {
        std::string out;
        for (char c : s) {
            if (c == '"' || c == '\\') out += '\\';
            out += c;
        }
        return out;
    };
    std::string out = "digraph mc {\n  rankdir=TB;\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        out += "  n" + std::to_string(i) + " [label=\"" + escape(g.nodes[i]) + "\"];\n";
    for (const auto& [u, v] : g.edges)
        out += "  n" + std::to_string(u) + " -> n" + std::to_string(v) + ";\n";
    out += "}\n";
    return out;
}

}  // namespace cqd
