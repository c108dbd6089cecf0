#pragma once

#include <optional>
#include <tuple>

#include "canonical.hpp"
#include "core.hpp"

namespace cqd {

using VarMapping = std::map<std::string, std::string>;

// A variable mapping sending every atom of `from` onto an atom of `to` and
// the head of `from` positionally onto the head of `to`.  The search is a
// complete backtracking search: head positions seed the bindings, atoms are
// matched most-constrained-first, and candidate target atoms are tried in
// body order, so the returned witness is deterministic.
inline std::optional<VarMapping> find_homomorphism(const ConjunctiveQuery& from,
                                                   const ConjunctiveQuery& to) {
    if (from.arity() != to.arity())
        throw Error("arity mismatch: " + std::to_string(from.arity()) + " vs " +
                    std::to_string(to.arity()));
    std::map<std::string, std::size_t> arities;
    for (const ConjunctiveQuery* q : {&from, &to})
        for (const auto& a : q->body) {
            auto [it, fresh] = arities.emplace(a.relation, a.args.size());
            if (!fresh && it->second != a.args.size())
                throw Error("schema mismatch: relation " + a.relation +
                            " used with two different arities");
        }

    VarMapping binding;
    for (std::size_t i = 0; i < from.head.size(); ++i) {
        auto [it, fresh] = binding.emplace(from.head[i], to.head[i]);
        if (!fresh && it->second != to.head[i]) return std::nullopt;
    }

    std::map<std::string, std::vector<const Atom*>> targets;
    for (const auto& a : to.body) targets[a.relation].push_back(&a);

    std::vector<const Atom*> order;
    {
        std::set<std::string> bound;
        for (const auto& [v, unused] : binding) bound.insert(v);
        std::vector<const Atom*> remaining;
        for (const auto& a : from.body) remaining.push_back(&a);
        while (!remaining.empty()) {
            auto score = [&](const Atom* a) {
                std::set<std::string> unbound;
                for (const auto& v : a->args)
                    if (!bound.contains(v)) unbound.insert(v);
                auto it = targets.find(a->relation);
                std::size_t candidates = it == targets.end() ? 0 : it->second.size();
                return std::tuple(unbound.size(), candidates, *a);
            };
            std::size_t best = 0;
            for (std::size_t i = 1; i < remaining.size(); ++i)
                if (score(remaining[i]) < score(remaining[best])) best = i;
            const Atom* chosen = remaining[best];
            remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
            order.push_back(chosen);
            for (const auto& v : chosen->args) bound.insert(v);
        }
    }

    auto walk = [&](auto&& self, std::size_t i) -> bool {
        if (i == order.size()) return true;
        const Atom& a = *order[i];
        auto it = targets.find(a.relation);
        if (it == targets.end()) return false;
        for (const Atom* t : it->second) {
            std::vector<const std::string*> added;
            bool ok = true;
            for (std::size_t j = 0; j < a.args.size() && ok; ++j) {
                auto [bit, fresh] = binding.emplace(a.args[j], t->args[j]);
                if (fresh) added.push_back(&a.args[j]);
                else if (bit->second != t->args[j]) ok = false;
            }
            if (ok && self(self, i + 1)) return true;
            for (const auto* v : added) binding.erase(*v);
        }
        return false;
    };
    if (!walk(walk, 0)) return std::nullopt;
    return binding;
}

// q1 is contained in q2 iff there is a homomorphism from q2 to q1.
inline bool contains(const ConjunctiveQuery& q1, const ConjunctiveQuery& q2) {
    return find_homomorphism(q2, q1).has_value();
}

inline bool equivalent(const ConjunctiveQuery& q1, const ConjunctiveQuery& q2) {
    return contains(q1, q2) && contains(q2, q1);
}

// Smallest equivalent query, computed by removing one atom at a time while an
// endomorphism into the remainder exists.  Removal is attempted in canonical
// order and the result is returned in canonical form, so the outcome does not
// depend on how the input was written.
inline ConjunctiveQuery core(const ConjunctiveQuery& q) {
    ConjunctiveQuery work = canonical_form(q);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < work.body.size() && !changed; ++i) {
            if (work.body.size() == 1) break;
            std::vector<Atom> rest;
            rest.reserve(work.body.size() - 1);
            for (std::size_t j = 0; j < work.body.size(); ++j)
                if (j != i) rest.push_back(work.body[j]);
            std::set<std::string> rest_vars;
            for (const auto& a : rest)
                for (const auto& v : a.args) rest_vars.insert(v);
            bool head_covered = true;
            for (const auto& v : work.head)
                if (!rest_vars.contains(v)) {
                    head_covered = false;
                    break;
                }
            if (!head_covered) continue;
            ConjunctiveQuery candidate{work.head, std::move(rest)};
            // candidate subsumes work for free; equivalence needs work -> candidate
            if (find_homomorphism(work, candidate)) {
                work = canonical_form(candidate);
                changed = true;
            }
        }
    }
    return work;
}

inline bool is_minimal(const ConjunctiveQuery& q) {
    return core(q).body.size() == q.body.size();
}

}  // namespace cqd
