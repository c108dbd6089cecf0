#pragma once

#include "core.hpp"

namespace cqd {

// All answers of q on inst: the set of head images over every embedding of
// the body into the fact set.  For Boolean queries the result is {} (false)
// or {()} (true).
inline std::set<std::vector<std::string>> evaluate(const ConjunctiveQuery& q, const Instance& inst) {
    std::map<std::string, std::vector<const Fact*>> facts_by_relation;
    for (const auto& f : inst.facts) facts_by_relation[f.relation].push_back(&f);
    std::map<std::string, std::size_t> atom_arity;
    for (const auto& a : q.body) {
        auto [it, fresh] = atom_arity.emplace(a.relation, a.args.size());
        if (!fresh && it->second != a.args.size())
            throw Error("schema mismatch: relation " + a.relation +
                        " used with two different arities in the query");
    }
    for (const auto& f : inst.facts) {
        auto it = atom_arity.find(f.relation);
        if (it != atom_arity.end() && it->second != f.args.size())
            throw Error("schema mismatch: relation " + f.relation + " has arity " +
                        std::to_string(f.args.size()) + " in the instance but " +
                        std::to_string(it->second) + " in the query");
    }
    {
        std::set<std::string> body_vars;
        for (const auto& a : q.body)
            for (const auto& v : a.args) body_vars.insert(v);
        for (const auto& v : q.head)
            if (!body_vars.contains(v))
                throw Error("head variable '" + v + "' does not occur in the body");
    }

    // Join order: prefer atoms whose variables are already bound.
    std::vector<const Atom*> order;
    {
        std::set<std::string> bound;
        std::vector<const Atom*> remaining;
        for (const auto& a : q.body) remaining.push_back(&a);
        while (!remaining.empty()) {
            std::size_t best = 0;
            auto score = [&](const Atom* a) {
                std::set<std::string> unbound;
                for (const auto& v : a->args)
                    if (!bound.contains(v)) unbound.insert(v);
                auto it = facts_by_relation.find(a->relation);
                std::size_t candidates = it == facts_by_relation.end() ? 0 : it->second.size();
                return std::tuple(unbound.size(), candidates, *a);
            };
            for (std::size_t i = 1; i < remaining.size(); ++i)
                if (score(remaining[i]) < score(remaining[best])) best = i;
            const Atom* chosen = remaining[best];
            remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
            order.push_back(chosen);
            for (const auto& v : chosen->args) bound.insert(v);
        }
    }

    std::set<std::vector<std::string>> results;
    std::map<std::string, std::string> binding;
    auto walk = [&](auto&& self, std::size_t i) -> void {
        if (i == order.size()) {
            std::vector<std::string> tuple;
            tuple.reserve(q.head.size());
            for (const auto& v : q.head) tuple.push_back(binding.at(v));
            results.insert(std::move(tuple));
            return;
        }
        const Atom& a = *order[i];
        auto it = facts_by_relation.find(a.relation);
        if (it == facts_by_relation.end()) return;
        for (const Fact* f : it->second) {
            std::vector<const std::string*> added;
            bool ok = true;
            for (std::size_t j = 0; j < a.args.size() && ok; ++j) {
                auto [bit, fresh] = binding.emplace(a.args[j], f->args[j]);
                if (fresh) added.push_back(&a.args[j]);
                else if (bit->second != f->args[j]) ok = false;
            }
            if (ok) self(self, i + 1);
            for (const auto* v : added) binding.erase(*v);
        }
    };
    walk(walk, 0);
    return results;
}

// Canonical database of a query: one fact per body atom with every variable
// replaced by its own constant.  The frozen head tuple is a member of
// evaluate(q2, freeze(q1).instance) exactly when q1 is contained in q2, which
// makes this the evaluation-side containment oracle.
inline FrozenQuery freeze(const ConjunctiveQuery& q) {
    FrozenQuery out;
    auto constant = [](const std::string& v) { return "c_" + v; };
    for (const auto& a : q.body) {
        Fact f{a.relation, {}};
        f.args.reserve(a.args.size());
        for (const auto& v : a.args) f.args.push_back(constant(v));
        out.instance.facts.insert(std::move(f));
    }
    out.head_tuple.reserve(q.head.size());
    for (const auto& v : q.head) out.head_tuple.push_back(constant(v));
    return out;
}

}  // namespace cqd
