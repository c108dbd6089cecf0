#pragma once

#include "canonical.hpp"
#include "core.hpp"
#include "hom.hpp"

namespace cqd {

enum class RestrictionType { type1 = 1, type2 = 2, type3 = 3, type4 = 4 };

struct RestrictionKind {
    RestrictionType type;
    std::string relation;   // type2/3: the added relation; type4: the first relation
    std::string relation2;  // type4: the second relation
    std::string var;        // type1: the variable the map moves; type3/4: the moved fresh variable
    std::string target;     // type1/3: where it goes; type4: the identified variable of the second atom

    std::string describe() const {
        switch (type) {
            case RestrictionType::type1: return "type-1: " + var + " -> " + target;
            case RestrictionType::type2: return "type-2: add " + relation;
            case RestrictionType::type3: return "type-3: duplicate " + relation + " with " + var + " -> " + target;
            case RestrictionType::type4:
                return "type-4: add " + relation + "," + relation2 + " with " + var + " = " + target;
        }
        return {};
    }
};

struct RestrictionResult {
    ConjunctiveQuery query;
    RestrictionKind kind;
    ConjunctiveQuery parent;
};

namespace detail {

inline void ensure_valid_two_cq(const ConjunctiveQuery& q, const Schema& schema) {
    for (const auto& v : validate(q, schema))
        if (v.kind == Violation::Kind::Hard) throw Error(v.message);
    if (!is_two_cq(q)) throw Error("not a 2CQ: some relation name occurs more than twice");
}

inline ConjunctiveQuery substitute(const ConjunctiveQuery& q, const std::string& from,
                                   const std::string& to) {
    std::vector<std::string> head = q.head;
    for (auto& v : head)
        if (v == from) v = to;
    std::vector<Atom> body = q.body;
    for (auto& a : body)
        for (auto& v : a.args)
            if (v == from) v = to;
    return make_query(std::move(head), std::move(body));
}

inline std::vector<std::string> fresh_variables(const std::set<std::string>& taken,
                                                std::size_t count, std::size_t& serial) {
    std::vector<std::string> out;
    while (out.size() < count) {
        std::string v = "fv" + std::to_string(++serial);
        if (!taken.contains(v)) out.push_back(std::move(v));
    }
    return out;
}

}  // namespace detail

// Every syntactically distinct restriction of the requested type, one entry
// per query modulo renaming.  Type 1 unifies one variable with another
// (keeping distinguished variables distinguished); type 2 appends an atom of
// an unused relation over fresh variables; type 3 duplicates a once-used
// relation's atom with exactly one fresh position constrained; type 4 appends
// linked atoms of two distinct once-used relations sharing one fresh
// variable.
inline std::vector<RestrictionResult> generate_restrictions(const ConjunctiveQuery& q,
                                                            const Schema& schema,
                                                            RestrictionType type) {
    detail::ensure_valid_two_cq(q, schema);
    std::vector<RestrictionResult> out;
    std::set<std::string> seen;
    auto add = [&](ConjunctiveQuery r, RestrictionKind kind) {
        if (seen.insert(canonicalize(r)).second)
            out.push_back({std::move(r), std::move(kind), q});
    };

    auto vars = q.variables();
    std::sort(vars.begin(), vars.end());
    const std::set<std::string> var_set(vars.begin(), vars.end());
    const std::set<std::string> distinguished(q.head.begin(), q.head.end());
    std::map<std::string, int> occurrences;
    for (const auto& a : q.body) ++occurrences[a.relation];

    switch (type) {
        case RestrictionType::type1:
            for (const auto& y : vars)
                for (const auto& t : vars) {
                    if (t == y) continue;
                    if (distinguished.contains(y) && !distinguished.contains(t)) continue;
                    add(detail::substitute(q, y, t),
                        {RestrictionType::type1, "", "", y, t});
                }
            break;

        case RestrictionType::type2:
            for (const auto& [name, ar] : schema.relations) {
                if (occurrences.contains(name)) continue;
                std::size_t serial = 0;
                auto body = q.body;
                body.push_back({name, detail::fresh_variables(var_set, ar, serial)});
                add(make_query(q.head, std::move(body)),
                    {RestrictionType::type2, name, "", "", ""});
            }
            break;

        case RestrictionType::type3:
            for (const auto& [name, count] : occurrences) {
                if (count != 1) continue;
                const std::size_t ar = schema.arity(name);
                if (ar == 0) continue;
                std::size_t serial = 0;
                const auto fresh = detail::fresh_variables(var_set, ar, serial);
                for (std::size_t i = 0; i < ar; ++i) {
                    std::vector<std::string> candidates(vars);
                    for (std::size_t j = 0; j < ar; ++j)
                        if (j != i) candidates.push_back(fresh[j]);
                    for (const auto& t : candidates) {
                        auto args = fresh;
                        args[i] = t;
                        auto body = q.body;
                        body.push_back({name, std::move(args)});
                        add(make_query(q.head, std::move(body)),
                            {RestrictionType::type3, name, "", fresh[i], t});
                    }
                }
            }
            break;

        case RestrictionType::type4: {
            std::vector<std::string> once;
            for (const auto& [name, count] : occurrences)
                if (count == 1 && schema.arity(name) > 0) once.push_back(name);
            for (std::size_t p = 0; p < once.size(); ++p)
                for (std::size_t r = p + 1; r < once.size(); ++r) {
                    std::size_t serial = 0;
                    const auto fresh1 =
                        detail::fresh_variables(var_set, schema.arity(once[p]), serial);
                    const auto fresh2 =
                        detail::fresh_variables(var_set, schema.arity(once[r]), serial);
                    for (std::size_t i = 0; i < fresh1.size(); ++i)
                        for (std::size_t j = 0; j < fresh2.size(); ++j) {
                            auto args1 = fresh1;
                            args1[i] = fresh2[j];
                            auto body = q.body;
                            body.push_back({once[p], std::move(args1)});
                            body.push_back({once[r], fresh2});
                            add(make_query(q.head, std::move(body)),
                                {RestrictionType::type4, once[p], once[r], fresh1[i], fresh2[j]});
                        }
                }
            break;
        }
    }
    return out;
}

// RR(q): all type-2 restrictions plus those cores of type-1/3/4 restrictions
// that are inequivalent to q and not properly contained in another candidate.
// Candidates are deduplicated up to equivalence first (cores are unique up to
// renaming, so canonical-text identity decides it); a candidate is then
// dropped only when a genuinely different candidate strictly dominates it.
// The result is exactly the set of queries maximally contained in q.
inline std::vector<ConjunctiveQuery> reduced_restrictions(const ConjunctiveQuery& q,
                                                          const Schema& schema) {
    detail::ensure_valid_two_cq(q, schema);
    if (!is_minimal(q))
        throw Error("reduced restrictions are defined for minimal queries; core the input first");
    const std::string parent_text = canonicalize(q);

    std::map<std::string, ConjunctiveQuery> candidates;
    for (auto type : {RestrictionType::type1, RestrictionType::type3, RestrictionType::type4})
        for (auto& r : generate_restrictions(q, schema, type)) {
            auto cored = core(r.query);
            auto text = render(cored);
            if (text == parent_text) continue;
            candidates.emplace(std::move(text), std::move(cored));
        }

    std::vector<std::pair<std::string, ConjunctiveQuery>> kept;
    for (const auto& [text, candidate] : candidates) {
        bool dominated = false;
        for (const auto& [other_text, other] : candidates) {
            if (other_text == text) continue;
            if (contains(candidate, other)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) kept.emplace_back(text, candidate);
    }
    for (auto& r : generate_restrictions(q, schema, RestrictionType::type2)) {
        auto cored = core(r.query);  // already minimal; coring canonicalizes
        kept.emplace_back(render(cored), std::move(cored));
    }

    std::sort(kept.begin(), kept.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<ConjunctiveQuery> result;
    result.reserve(kept.size());
    for (auto& [text, query] : kept) result.push_back(std::move(query));
    return result;
}

// q1 is maximally contained in q2 iff core(q1) appears in RR(core(q2)).
inline bool is_maximally_contained(const ConjunctiveQuery& q1, const ConjunctiveQuery& q2,
                                   const Schema& schema) {
    detail::ensure_valid_two_cq(q1, schema);
    detail::ensure_valid_two_cq(q2, schema);
    if (q1.arity() != q2.arity())
        throw Error("arity mismatch: " + std::to_string(q1.arity()) + " vs " +
                    std::to_string(q2.arity()));
    const std::string t1 = render(core(q1));
    for (const auto& r : reduced_restrictions(core(q2), schema))
        if (render(r) == t1) return true;
    return false;
}

}  // namespace cqd
