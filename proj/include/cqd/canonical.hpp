#pragma once

#include <optional>

#include "core.hpp"

namespace cqd {
namespace detail {

// Atom pattern under a partial variable numbering.  Unseen variables get
// provisional indices next, next+1, ... in order of appearance, consistently
// within the atom.
using AtomCode = std::pair<std::string, std::vector<int>>;

inline AtomCode encode_atom(const Atom& a, const std::map<std::string, int>& assigned, int next) {
    AtomCode code{a.relation, {}};
    std::map<std::string, int> provisional;
    for (const auto& v : a.args) {
        if (auto it = assigned.find(v); it != assigned.end()) {
            code.second.push_back(it->second);
        } else if (auto p = provisional.find(v); p != provisional.end()) {
            code.second.push_back(p->second);
        } else {
            provisional.emplace(v, next);
            code.second.push_back(next);
            ++next;
        }
    }
    return code;
}

}  // namespace detail

// Canonical form: head variables are numbered v0, v1, ... by first occurrence
// in the head; body atoms are then ordered (and the remaining variables
// numbered by first occurrence) so that the encoded atom sequence is
// lexicographically least over every admissible order.  Ties at a position
// are explored exhaustively, so two queries produce the same canonical form
// exactly when a variable bijection maps one onto the other, head position by
// head position.  Bodies here stay small (at most two atoms per relation
// name), which keeps the tie search cheap.
inline ConjunctiveQuery canonical_form(const ConjunctiveQuery& q) {
    std::map<std::string, int> pinned;
    int pin_count = 0;
    for (const auto& v : q.head)
        if (pinned.emplace(v, pin_count).second) ++pin_count;

    const std::size_t n = q.body.size();
    std::vector<detail::AtomCode> best_seq;
    std::vector<std::size_t> best_order;
    bool have_best = false;

    std::vector<bool> used(n, false);
    std::vector<detail::AtomCode> seq;
    std::vector<std::size_t> order;

    auto search = [&](auto&& self, const std::map<std::string, int>& assigned, int next) -> void {
        if (order.size() == n) {
            if (!have_best || seq < best_seq) {
                best_seq = seq;
                best_order = order;
                have_best = true;
            }
            return;
        }
        std::optional<detail::AtomCode> min_code;
        for (std::size_t i = 0; i < n; ++i) {
            if (used[i]) continue;
            auto code = detail::encode_atom(q.body[i], assigned, next);
            if (!min_code || code < *min_code) min_code = std::move(code);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (used[i]) continue;
            auto code = detail::encode_atom(q.body[i], assigned, next);
            if (code != *min_code) continue;
            auto extended = assigned;
            int next2 = next;
            for (const auto& v : q.body[i].args)
                if (extended.emplace(v, next2).second) ++next2;
            used[i] = true;
            order.push_back(i);
            seq.push_back(std::move(code));
            self(self, extended, next2);
            used[i] = false;
            order.pop_back();
            seq.pop_back();
        }
    };
    search(search, pinned, pin_count);

    std::map<std::string, int> final_names = pinned;
    int next = pin_count;
    auto name = [](int i) { return "v" + std::to_string(i); };
    ConjunctiveQuery out;
    for (std::size_t idx : best_order) {
        const Atom& a = q.body[idx];
        Atom renamed{a.relation, {}};
        for (const auto& v : a.args) {
            auto [it, fresh] = final_names.emplace(v, next);
            if (fresh) ++next;
            renamed.args.push_back(name(it->second));
        }
        out.body.push_back(std::move(renamed));
    }
    for (const auto& v : q.head) out.head.push_back(name(final_names.at(v)));
    return out;
}

inline std::string canonicalize(const ConjunctiveQuery& q) {
    return render(canonical_form(q));
}

}  // namespace cqd
