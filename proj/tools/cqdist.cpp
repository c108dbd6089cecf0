// Command-line front end: parsing and validation, evaluation, containment
// and equivalence checks, cores, restriction enumeration, maximal
// containment, MC-graph construction with caching and DOT output, distance
// queries, and the oriented-path-query verification harness.
//
// Exit codes: 0 success (or property true), 1 property false, 2 usage or
// input error, 3 internal invariant failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include <cqd/cqd.hpp>

namespace {

using nlohmann::ordered_json;

constexpr int exit_ok = 0;
constexpr int exit_false = 1;
constexpr int exit_input = 2;
constexpr int exit_internal = 3;

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw cqd::Error("cannot read file: " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Query and instance arguments may be inline text or a path to a file.
std::string file_or_inline(const std::string& arg) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(arg, ec)) return slurp(arg);
    return arg;
}

struct CommonOptions {
    std::string format = "human";

    bool structured() const { return format == "structured"; }
};

void add_format_flag(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"human", "structured"}))
        ->capture_default_str();
}

ordered_json query_json(const cqd::ConjunctiveQuery& q) {
    ordered_json body = ordered_json::array();
    for (const auto& a : q.body) body.push_back({{"relation", a.relation}, {"args", a.args}});
    return {{"head", q.head}, {"body", std::move(body)}};
}

ordered_json instance_json(const cqd::Instance& inst) {
    ordered_json facts = ordered_json::array();
    for (const auto& f : inst.facts) facts.push_back({{"relation", f.relation}, {"args", f.args}});
    return facts;
}

void emit(const ordered_json& payload) { std::cout << payload.dump(2) << "\n"; }

std::string default_cache_name(const cqd::Schema& schema, std::size_t alpha) {
    const std::string key = cqd::render(schema);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : key) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream name;
    name << "mcgraph-" << std::hex << h << "-a" << std::dec << alpha << ".txt";
    return name.str();
}

// --- subcommand payloads -------------------------------------------------

struct ParseArgs {
    CommonOptions common;
    std::string query, schema;
};

int run_parse(const ParseArgs& a) {
    std::optional<cqd::Schema> schema;
    if (!a.schema.empty()) schema = cqd::parse_schema(file_or_inline(a.schema));
    auto q = schema ? cqd::parse_query(file_or_inline(a.query), *schema)
                    : cqd::parse_query(file_or_inline(a.query));
    bool two_cq = cqd::is_two_cq(q);
    if (a.common.structured()) {
        ordered_json out = query_json(q);
        out["arity"] = q.arity();
        out["size"] = cqd::query_size(q);
        out["two_cq"] = two_cq;
        out["canonical"] = cqd::canonicalize(q);
        emit(out);
    } else {
        std::cout << "query: " << cqd::render(q) << "\n";
        std::cout << "arity: " << q.arity() << "\n";
        std::cout << "size: " << cqd::query_size(q) << "\n";
        std::cout << "canonical: " << cqd::canonicalize(q) << "\n";
        std::cout << "2cq: " << (two_cq ? "yes" : "no") << "\n";
    }
    return exit_ok;
}

struct EvalArgs {
    CommonOptions common;
    std::string query, instance, schema;
};

int run_eval(const EvalArgs& a) {
    std::optional<cqd::Schema> schema;
    if (!a.schema.empty()) schema = cqd::parse_schema(file_or_inline(a.schema));
    auto q = schema ? cqd::parse_query(file_or_inline(a.query), *schema)
                    : cqd::parse_query(file_or_inline(a.query));
    auto inst = schema ? cqd::parse_instance(file_or_inline(a.instance), *schema)
                       : cqd::parse_instance(file_or_inline(a.instance));
    auto tuples = cqd::evaluate(q, inst);
    if (a.common.structured()) {
        ordered_json out;
        out["tuples"] = tuples;
        if (q.arity() == 0) out["result"] = !tuples.empty();
        emit(out);
    } else if (q.arity() == 0) {
        std::cout << (tuples.empty() ? "false" : "true") << "\n";
    } else {
        for (const auto& t : tuples) std::cout << "(" << cqd::detail::join(t, ", ") << ")\n";
    }
    if (q.arity() == 0) return tuples.empty() ? exit_false : exit_ok;
    return exit_ok;
}

struct PairArgs {
    CommonOptions common;
    std::string q1, q2, schema;
    bool witness = false;
};

std::pair<cqd::ConjunctiveQuery, cqd::ConjunctiveQuery> parse_pair(const PairArgs& a) {
    std::optional<cqd::Schema> schema;
    if (!a.schema.empty()) schema = cqd::parse_schema(file_or_inline(a.schema));
    auto parse = [&](const std::string& s) {
        return schema ? cqd::parse_query(file_or_inline(s), *schema)
                      : cqd::parse_query(file_or_inline(s));
    };
    return {parse(a.q1), parse(a.q2)};
}

int run_contains(const PairArgs& a) {
    auto [q1, q2] = parse_pair(a);
    auto witness = cqd::find_homomorphism(q2, q1);  // q1 contained in q2 iff q2 -> q1
    const bool contained = witness.has_value();
    if (a.common.structured()) {
        ordered_json out{{"contained", contained}};
        if (a.witness && contained) out["witness"] = *witness;
        if (a.witness && !contained) {
            auto frozen = cqd::freeze(q1);
            out["counterexample"] = {{"facts", instance_json(frozen.instance)},
                                     {"head_tuple", frozen.head_tuple}};
        }
        emit(out);
    } else {
        std::cout << (contained ? "contained" : "not contained") << "\n";
        if (a.witness && contained) {
            std::string sep;
            std::cout << "witness: ";
            for (const auto& [from, to] : *witness) {
                std::cout << sep << from << " -> " << to;
                sep = ", ";
            }
            std::cout << "\n";
        }
        if (a.witness && !contained) {
            auto frozen = cqd::freeze(q1);
            std::cout << "counterexample instance:\n" << cqd::render(frozen.instance);
            std::cout << "counterexample tuple: (" << cqd::detail::join(frozen.head_tuple, ", ")
                      << ")\n";
        }
    }
    return contained ? exit_ok : exit_false;
}

int run_equiv(const PairArgs& a) {
    auto [q1, q2] = parse_pair(a);
    const bool eq = cqd::equivalent(q1, q2);
    if (a.common.structured()) emit({{"equivalent", eq}});
    else std::cout << (eq ? "equivalent" : "not equivalent") << "\n";
    return eq ? exit_ok : exit_false;
}

struct CoreArgs {
    CommonOptions common;
    std::string query, schema;
};

int run_core(const CoreArgs& a) {
    std::optional<cqd::Schema> schema;
    if (!a.schema.empty()) schema = cqd::parse_schema(file_or_inline(a.schema));
    auto q = schema ? cqd::parse_query(file_or_inline(a.query), *schema)
                    : cqd::parse_query(file_or_inline(a.query));
    auto cored = cqd::core(q);
    if (a.common.structured()) {
        ordered_json out = query_json(cored);
        out["canonical"] = cqd::render(cored);
        out["minimal_input"] = cored.body.size() == q.body.size();
        emit(out);
    } else {
        std::cout << cqd::render(cored) << "\n";
    }
    return exit_ok;
}

struct RestrictArgs {
    CommonOptions common;
    std::string query, schema;
    int type = 0;
    bool reduced = false;
};

int run_restrict(const RestrictArgs& a) {
    auto schema = cqd::parse_schema(file_or_inline(a.schema));
    auto q = cqd::parse_query(file_or_inline(a.query), schema);
    if (a.reduced == (a.type != 0))
        throw CLI::ValidationError("restrict", "pass exactly one of --type or --reduced");
    if (a.reduced) {
        auto rr = cqd::reduced_restrictions(cqd::core(q), schema);
        if (a.common.structured()) {
            ordered_json list = ordered_json::array();
            for (const auto& r : rr) {
                ordered_json entry = query_json(r);
                entry["canonical"] = cqd::render(r);
                list.push_back(std::move(entry));
            }
            emit({{"reduced", std::move(list)}});
        } else {
            for (const auto& r : rr) std::cout << cqd::render(r) << "\n";
        }
        return exit_ok;
    }
    auto results =
        cqd::generate_restrictions(q, schema, static_cast<cqd::RestrictionType>(a.type));
    if (a.common.structured()) {
        ordered_json list = ordered_json::array();
        for (const auto& r : results) {
            ordered_json entry = query_json(r.query);
            entry["type"] = static_cast<int>(r.kind.type);
            entry["detail"] = r.kind.describe();
            list.push_back(std::move(entry));
        }
        emit({{"restrictions", std::move(list)}});
    } else {
        for (const auto& r : results)
            std::cout << cqd::render(r.query) << "  [" << r.kind.describe() << "]\n";
    }
    return exit_ok;
}

int run_maxcont(const PairArgs& a) {
    if (a.schema.empty()) throw CLI::ValidationError("maxcont", "--schema is required");
    auto schema = cqd::parse_schema(file_or_inline(a.schema));
    auto q1 = cqd::parse_query(file_or_inline(a.q1), schema);
    auto q2 = cqd::parse_query(file_or_inline(a.q2), schema);
    const bool mc = cqd::is_maximally_contained(q1, q2, schema);
    if (a.common.structured()) emit({{"maximally_contained", mc}});
    else std::cout << (mc ? "maximally contained" : "not maximally contained") << "\n";
    return mc ? exit_ok : exit_false;
}

struct DistanceArgs {
    CommonOptions common;
    std::string q1, q2, schema, cache;
    bool no_cache = false;
    bool witness = false;
    std::size_t max_nodes = 100000;
};

cqd::MCGraph obtain_graph(const cqd::Schema& schema, std::size_t alpha, const std::string& cache,
                          bool no_cache, std::size_t max_nodes) {
    if (no_cache) return cqd::build_mc_graph(schema, alpha, {max_nodes});
    const std::filesystem::path path = cache.empty() ? default_cache_name(schema, alpha) : cache;
    std::error_code ec;
    if (std::filesystem::is_regular_file(path, ec)) return cqd::load_graph(path, schema, alpha);
    auto g = cqd::build_mc_graph(schema, alpha, {max_nodes});
    try {
        cqd::save_graph(g, path);
    } catch (const cqd::Error& e) {
        std::cerr << "warning: " << e.what() << "\n";
    }
    return g;
}

int run_distance(const DistanceArgs& a) {
    auto schema = cqd::parse_schema(file_or_inline(a.schema));
    auto q1 = cqd::parse_query(file_or_inline(a.q1), schema);
    auto q2 = cqd::parse_query(file_or_inline(a.q2), schema);
    if (q1.arity() != q2.arity())
        throw cqd::Error("arity mismatch: " + std::to_string(q1.arity()) + " vs " +
                         std::to_string(q2.arity()));
    auto g = obtain_graph(schema, q1.arity(), a.cache, a.no_cache, a.max_nodes);
    auto path = cqd::shortest_path(g, q1, q2);
    if (a.common.structured()) {
        ordered_json out{{"distance", path.size() - 1}};
        if (a.witness) out["path"] = path;
        emit(out);
    } else {
        std::cout << path.size() - 1 << "\n";
        if (a.witness) {
            std::cout << "path:\n";
            for (const auto& node : path) std::cout << "  " << node << "\n";
        }
    }
    return exit_ok;
}

struct GraphArgs {
    CommonOptions common;
    std::string schema, cache, dot;
    std::size_t alpha = 0;
    std::size_t max_nodes = 100000;
};

int run_graph(const GraphArgs& a) {
    auto schema = cqd::parse_schema(file_or_inline(a.schema));
    auto g = cqd::build_mc_graph(schema, a.alpha, {a.max_nodes});
    if (!a.cache.empty()) cqd::save_graph(g, a.cache);
    if (!a.dot.empty()) {
        std::ofstream out(a.dot);
        if (!out) throw cqd::Error("cannot write DOT file: " + a.dot);
        out << cqd::to_dot(g);
    }
    const bool connected = cqd::is_connected(g);
    const std::string bottom = g.nodes[cqd::bottom_node(g)];
    if (a.common.structured()) {
        emit({{"nodes", g.nodes.size()},
              {"edges", g.edges.size()},
              {"bottom", bottom},
              {"connected", connected}});
    } else {
        std::cout << "nodes: " << g.nodes.size() << "\n";
        std::cout << "edges: " << g.edges.size() << "\n";
        std::cout << "bottom: " << bottom << "\n";
        std::cout << "connected: " << (connected ? "yes" : "no") << "\n";
    }
    return exit_ok;
}

struct OpqArgs {
    CommonOptions common;
    std::string bits, relation = "E";
    bool table = false;
    long chain_bound = -1;
};

int run_opq(const OpqArgs& a) {
    ordered_json out;
    bool all_ok = true;
    const bool default_run = a.bits.empty() && !a.table && a.chain_bound < 0;

    if (!a.bits.empty()) {
        auto q = cqd::opq_query(a.bits, a.relation);
        if (a.common.structured()) out["query"] = cqd::render(q);
        else std::cout << cqd::render(q) << "\n";
    }
    if (a.table || default_run) {
        auto report = cqd::verify_opq_table(a.relation);
        all_ok = all_ok && report.passed;
        if (a.common.structured()) {
            ordered_json rows = ordered_json::array();
            for (const auto& r : report.rows)
                rows.push_back({{"query", r.query},
                                {"reversal", r.reversal},
                                {"minimal", r.minimal},
                                {"reversal_ok", r.reversal_ok},
                                {"minimal_ok", r.minimal_ok}});
            out["table"] = {{"rows", std::move(rows)}, {"passed", report.passed}};
        } else {
            for (const auto& r : report.rows)
                std::cout << "row " << r.query << ": reversal " << (r.reversal_ok ? "ok" : "FAIL")
                          << ", minimal " << (r.minimal_ok ? "ok" : "FAIL") << "\n";
            std::cout << "table: " << (report.passed ? "pass" : "FAIL") << "\n";
        }
    }
    if (a.chain_bound >= 0 || default_run) {
        const std::size_t bound = a.chain_bound >= 0 ? static_cast<std::size_t>(a.chain_bound) : 10;
        auto report = cqd::check_chain(bound, a.relation);
        all_ok = all_ok && report.passed;
        if (a.common.structured()) {
            ordered_json steps = ordered_json::array();
            for (const auto& s : report.steps)
                steps.push_back({{"lower", s.lower},
                                 {"upper", s.upper},
                                 {"forward_holds", s.forward_holds},
                                 {"reverse_fails", s.reverse_fails}});
            out["chain"] = {{"bound", bound}, {"steps", std::move(steps)}, {"passed", report.passed}};
        } else {
            for (const auto& s : report.steps)
                std::cout << "step " << s.lower << " < " << s.upper << ": "
                          << (s.ok() ? "ok" : "FAIL") << "\n";
            std::cout << "chain: " << (report.passed ? "pass" : "FAIL") << "\n";
        }
    }
    if (a.common.structured()) {
        out["passed"] = all_ok;
        emit(out);
    }
    return all_ok ? exit_ok : exit_false;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semantic distance tools for conjunctive queries"};
    app.require_subcommand(1);

    ParseArgs parse_args;
    auto* cmd_parse = app.add_subcommand("parse", "Parse a query and report its shape");
    cmd_parse->add_option("--query", parse_args.query, "Query text or file")->required();
    cmd_parse->add_option("--schema", parse_args.schema, "Schema file");
    add_format_flag(cmd_parse, parse_args.common);

    EvalArgs eval_args;
    auto* cmd_eval = app.add_subcommand("eval", "Evaluate a query on an instance");
    cmd_eval->add_option("--query", eval_args.query, "Query text or file")->required();
    cmd_eval->add_option("--instance", eval_args.instance, "Instance text or file")->required();
    cmd_eval->add_option("--schema", eval_args.schema, "Schema file");
    add_format_flag(cmd_eval, eval_args.common);

    PairArgs contains_args;
    auto* cmd_contains = app.add_subcommand("contains", "Decide containment of --q1 in --q2");
    cmd_contains->add_option("--q1", contains_args.q1, "Query text or file")->required();
    cmd_contains->add_option("--q2", contains_args.q2, "Query text or file")->required();
    cmd_contains->add_option("--schema", contains_args.schema, "Schema file");
    cmd_contains->add_flag("--witness", contains_args.witness,
                           "Show a homomorphism or a counterexample instance");
    add_format_flag(cmd_contains, contains_args.common);

    PairArgs equiv_args;
    auto* cmd_equiv = app.add_subcommand("equiv", "Decide equivalence of two queries");
    cmd_equiv->add_option("--q1", equiv_args.q1, "Query text or file")->required();
    cmd_equiv->add_option("--q2", equiv_args.q2, "Query text or file")->required();
    cmd_equiv->add_option("--schema", equiv_args.schema, "Schema file");
    add_format_flag(cmd_equiv, equiv_args.common);

    CoreArgs core_args;
    auto* cmd_core = app.add_subcommand("core", "Minimize a query");
    cmd_core->add_option("--query", core_args.query, "Query text or file")->required();
    cmd_core->add_option("--schema", core_args.schema, "Schema file");
    add_format_flag(cmd_core, core_args.common);

    RestrictArgs restrict_args;
    auto* cmd_restrict = app.add_subcommand("restrict", "Enumerate restrictions of a 2CQ");
    cmd_restrict->add_option("--query", restrict_args.query, "Query text or file")->required();
    cmd_restrict->add_option("--schema", restrict_args.schema, "Schema file")->required();
    cmd_restrict->add_option("--type", restrict_args.type, "Restriction type (1-4)")
        ->check(CLI::Range(1, 4));
    cmd_restrict->add_flag("--reduced", restrict_args.reduced,
                           "Emit the reduced set of restrictions instead");
    add_format_flag(cmd_restrict, restrict_args.common);

    PairArgs maxcont_args;
    auto* cmd_maxcont = app.add_subcommand("maxcont", "Decide maximal containment of --q1 in --q2");
    cmd_maxcont->add_option("--q1", maxcont_args.q1, "Query text or file")->required();
    cmd_maxcont->add_option("--q2", maxcont_args.q2, "Query text or file")->required();
    cmd_maxcont->add_option("--schema", maxcont_args.schema, "Schema file")->required();
    add_format_flag(cmd_maxcont, maxcont_args.common);

    DistanceArgs distance_args;
    auto* cmd_distance = app.add_subcommand("distance", "Shortest-path distance between two 2CQs");
    cmd_distance->add_option("--q1", distance_args.q1, "Query text or file")->required();
    cmd_distance->add_option("--q2", distance_args.q2, "Query text or file")->required();
    cmd_distance->add_option("--schema", distance_args.schema, "Schema file")->required();
    cmd_distance->add_option("--cache", distance_args.cache, "Graph cache file");
    cmd_distance->add_flag("--no-cache", distance_args.no_cache, "Do not read or write a cache");
    cmd_distance->add_flag("--witness", distance_args.witness, "Show one shortest path");
    cmd_distance->add_option("--max-nodes", distance_args.max_nodes, "Node cap for graph construction")
        ->capture_default_str();
    add_format_flag(cmd_distance, distance_args.common);

    GraphArgs graph_args;
    auto* cmd_graph = app.add_subcommand("graph", "Build the maximal-containment graph");
    cmd_graph->add_option("--schema", graph_args.schema, "Schema file")->required();
    cmd_graph->add_option("--arity", graph_args.alpha, "Query arity")->required();
    cmd_graph->add_option("--cache", graph_args.cache, "Write the graph cache here");
    cmd_graph->add_option("--dot", graph_args.dot, "Write a DOT rendering here");
    cmd_graph->add_option("--max-nodes", graph_args.max_nodes, "Node cap for graph construction")
        ->capture_default_str();
    add_format_flag(cmd_graph, graph_args.common);

    OpqArgs opq_args;
    auto* cmd_opq = app.add_subcommand("opq", "Oriented path query tools and checks");
    cmd_opq->add_option("--bits", opq_args.bits, "Print the query for a bit string");
    cmd_opq->add_flag("--table", opq_args.table, "Verify the length-1..4 equivalence table");
    cmd_opq->add_option("--chain-bound", opq_args.chain_bound,
                        "Verify the pumped ascending chain up to this index");
    cmd_opq->add_option("--relation", opq_args.relation, "Relation name for the atoms")
        ->capture_default_str();
    add_format_flag(cmd_opq, opq_args.common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    try {
        if (cmd_parse->parsed()) return run_parse(parse_args);
        if (cmd_eval->parsed()) return run_eval(eval_args);
        if (cmd_contains->parsed()) return run_contains(contains_args);
        if (cmd_equiv->parsed()) return run_equiv(equiv_args);
        if (cmd_core->parsed()) return run_core(core_args);
        if (cmd_restrict->parsed()) return run_restrict(restrict_args);
        if (cmd_maxcont->parsed()) return run_maxcont(maxcont_args);
        if (cmd_distance->parsed()) return run_distance(distance_args);
        if (cmd_graph->parsed()) return run_graph(graph_args);
        if (cmd_opq->parsed()) return run_opq(opq_args);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const cqd::NodeCapExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_internal;
    } catch (const cqd::GraphDisconnected& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_internal;
    } catch (const cqd::ClosureViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_internal;
    } catch (const cqd::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_internal;
    }
    return exit_input;
}
