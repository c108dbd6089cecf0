#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace cqd {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

// Syntax errors carry the byte offset of the offending input.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : Error(message + " (at offset " + std::to_string(offset) + ")"), offset(offset) {}

    std::size_t offset;
};

struct Schema {
    std::map<std::string, std::size_t> relations;  // name -> arity

    bool has(const std::string& name) const { return relations.contains(name); }

    bool operator==(const Schema&) const = default;

    std::size_t arity(const std::string& name) const {
        auto it = relations.find(name);
        if (it == relations.end()) throw Error("unknown relation name: " + name);
        return it->second;
    }
};

struct Atom {
    std::string relation;
    std::vector<std::string> args;

    auto operator<=>(const Atom&) const = default;
};

// Head tuple plus a body of atoms.  Bodies are kept deduplicated in
// first-occurrence order; the order itself carries no meaning (use the hom
// module to compare queries semantically).
struct ConjunctiveQuery {
    std::vector<std::string> head;
    std::vector<Atom> body;

    std::size_t arity() const { return head.size(); }

    // Distinct variables, head first, then body in argument order.
    std::vector<std::string> variables() const {
        std::vector<std::string> out;
        std::set<std::string> seen;
        auto add = [&](const std::string& v) {
            if (seen.insert(v).second) out.push_back(v);
        };
        for (const auto& v : head) add(v);
        for (const auto& a : body)
            for (const auto& v : a.args) add(v);
        return out;
    }

    bool operator==(const ConjunctiveQuery&) const = default;
};

// Normalizing constructor: collapses duplicate atoms (set semantics) and
// rejects structurally broken queries.
inline ConjunctiveQuery make_query(std::vector<std::string> head, std::vector<Atom> body) {
    ConjunctiveQuery q;
    q.head = std::move(head);
    std::set<Atom> seen;
    for (auto& a : body) {
        if (a.relation.empty()) throw Error("atom with an empty relation name");
        if (seen.insert(a).second) q.body.push_back(std::move(a));
    }
    if (q.body.empty()) throw Error("query body must contain at least one atom");
    std::set<std::string> body_vars;
    for (const auto& a : q.body)
        for (const auto& v : a.args) {
            if (v.empty()) throw Error("empty variable name");
            body_vars.insert(v);
        }
    for (const auto& v : q.head)
        if (!body_vars.contains(v))
            throw Error("head variable '" + v + "' does not occur in the body");
    return q;
}

struct Fact {
    std::string relation;
    std::vector<std::string> args;

    auto operator<=>(const Fact&) const = default;
};

struct Instance {
    std::set<Fact> facts;

    bool operator==(const Instance&) const = default;
};

// A query body read as data: variables become dedicated constants.
struct FrozenQuery {
    Instance instance;
    std::vector<std::string> head_tuple;
};

namespace detail {

inline std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace detail

inline std::string render(const Atom& a) {
    return a.relation + "(" + detail::join(a.args, ", ") + ")";
}

inline std::string render(const ConjunctiveQuery& q) {
    std::string out = "(" + detail::join(q.head, ", ") + ") <- ";
    for (std::size_t i = 0; i < q.body.size(); ++i) {
        if (i) out += ", ";
        out += render(q.body[i]);
    }
    return out;
}

inline std::string render(const Instance& inst) {
    std::string out;
    for (const auto& f : inst.facts)
        out += f.relation + "(" + detail::join(f.args, ", ") + ").\n";
    return out;
}

inline std::string render(const Schema& s) {
    std::string out;
    for (const auto& [name, ar] : s.relations)
        out += name + "/" + std::to_string(ar) + "\n";
    return out;
}

// arity + atom count + total argument count
inline std::size_t query_size(const ConjunctiveQuery& q) {
    std::size_t total = q.head.size() + q.body.size();
    for (const auto& a : q.body) total += a.args.size();
    return total;
}

// Each relation name may occur at most twice in the body.
inline bool is_two_cq(const ConjunctiveQuery& q) {
    std::map<std::string, int> counts;
    for (const auto& a : q.body)
        if (++counts[a.relation] > 2) return false;
    return true;
}

struct Violation {
    enum class Kind { Hard, NotTwoCq };
    Kind kind;
    std::string message;
};

// Report-based validation.  Hard entries make the query unusable over the
// schema; the 2CQ flag is informational and kept apart.
inline std::vector<Violation> validate(const ConjunctiveQuery& q, const Schema& schema) {
    std::vector<Violation> report;
    auto hard = [&](std::string m) { report.push_back({Violation::Kind::Hard, std::move(m)}); };

    if (q.body.empty()) hard("query body is empty");
    std::set<std::string> body_vars;
    for (const auto& a : q.body) {
        if (!schema.has(a.relation)) {
            hard("unknown relation name: " + a.relation);
            continue;
        }
        if (schema.arity(a.relation) != a.args.size())
            hard("arity mismatch: " + render(a) + " does not match " + a.relation + "/" +
                 std::to_string(schema.arity(a.relation)));
        for (const auto& v : a.args) body_vars.insert(v);
    }
    for (const auto& v : q.head)
        if (!body_vars.contains(v))
            hard("head variable '" + v + "' does not occur in the body");
    for (const auto& v : q.variables())
        if (v.empty() || !std::islower(static_cast<unsigned char>(v[0])))
            hard("variable '" + v + "' must begin with a lowercase letter");
    if (!is_two_cq(q))
        report.push_back({Violation::Kind::NotTwoCq,
                          "not a 2CQ: some relation name occurs more than twice"});
    return report;
}

}  // namespace cqd
