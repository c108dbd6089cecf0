#pragma once

#include <string_view>

#include "hom.hpp"

namespace cqd {
namespace detail {

inline void check_bits(std::string_view bits) {
    if (bits.empty()) throw Error("empty bit string");
    for (char c : bits)
        if (c != '0' && c != '1') throw Error("bit strings may contain only '0' and '1'");
}

}  // namespace detail

// Oriented path query encoded as a bit string over one binary relation:
// atom i runs forward (z_i -> z_{i+1}) on '1' and backward on '0'.
inline ConjunctiveQuery opq_query(std::string_view bits, const std::string& relation = "E") {
    detail::check_bits(bits);
    std::vector<Atom> body;
    auto z = [](std::size_t i) { return "z" + std::to_string(i); };
    for (std::size_t i = 1; i <= bits.size(); ++i) {
        if (bits[i - 1] == '1') body.push_back({relation, {z(i), z(i + 1)}});
        else body.push_back({relation, {z(i + 1), z(i)}});
    }
    return make_query({}, std::move(body));
}

inline std::string path_bits(std::size_t n) { return std::string(n, '1'); }

// Reading the atoms right to left: reverse the string and flip every bit.
// The resulting query is always equivalent to the original.
inline std::string reverse_opq(std::string_view bits) {
    detail::check_bits(bits);
    std::string out(bits.rbegin(), bits.rend());
    for (char& c : out) c = (c == '1') ? '0' : '1';
    return out;
}

// The pumped family: 111, 11011, 1101011, ... — "11" then i copies of "01"
// then "1".
inline std::string pumped_bits(std::size_t i) {
    if (i == 0) return "111";
    std::string out = "11";
    for (std::size_t k = 0; k < i; ++k) out += "01";
    out += "1";
    return out;
}

inline ConjunctiveQuery pumped_query(std::size_t i, const std::string& relation = "E") {
    return opq_query(pumped_bits(i), relation);
}

// A strictly ascending chain of pumped queries sitting between the path
// queries of length 3 and 2.  Each step checks that containment holds one way
// and fails the other; the final step checks strictness against the length-2
// path query.
struct ChainReport {
    struct Step {
        std::string lower, upper;
        bool forward_holds = false;  // lower contained in upper
        bool reverse_fails = false;  // upper not contained in lower

        bool ok() const { return forward_holds && reverse_fails; }
    };
    std::vector<Step> steps;
    bool passed = true;
};

inline ChainReport check_chain(std::size_t n, const std::string& relation = "E") {
    ChainReport report;
    auto step = [&](const std::string& lower, const std::string& upper) {
        auto ql = opq_query(lower, relation);
        auto qu = opq_query(upper, relation);
        ChainReport::Step s{lower, upper, contains(ql, qu), !contains(qu, ql)};
        report.passed = report.passed && s.ok();
        report.steps.push_back(std::move(s));
    };
    for (std::size_t i = 0; i < n; ++i) step(pumped_bits(i), pumped_bits(i + 1));
    step(pumped_bits(n), "11");
    return report;
}

struct OpqTableRow {
    const char* query;
    const char* reversal;  // "" when the reversal equals the query itself
    const char* minimal;   // "" when the query is already minimal
};

// Equivalences among oriented path queries of length up to four.
inline const std::vector<OpqTableRow>& opq_equivalence_table() {
    static const std::vector<OpqTableRow> rows = {
        {"1", "0", ""},
        {"11", "00", ""},
        {"10", "01", "1"},
        {"111", "000", ""},
        {"110", "100", "11"},
        {"001", "011", "11"},
        {"101", "010", "1"},
        {"1111", "0000", ""},
        {"1110", "1000", "111"},
        {"0111", "0001", "111"},
        {"1101", "0100", "11"},
        {"1011", "0010", "11"},
        {"1001", "0110", "11"},
        {"1100", "", "11"},
        {"0011", "", "11"},
        {"1010", "", "1"},
        {"0101", "", "1"},
    };
    return rows;
}

struct TableReport {
    struct Row {
        std::string query, reversal, minimal;
        bool reversal_ok = false;
        bool minimal_ok = false;

        bool ok() const { return reversal_ok && minimal_ok; }
    };
    std::vector<Row> rows;
    bool passed = true;
};

// Row by row: the reversal column names an equivalent query (blank: reversal
// reproduces the query itself); the minimal column names the core (blank: the
// query is already minimal).
inline TableReport verify_opq_table(const std::string& relation = "E") {
    TableReport report;
    for (const auto& entry : opq_equivalence_table()) {
        TableReport::Row row{entry.query, entry.reversal, entry.minimal};
        auto q = opq_query(row.query, relation);
        row.reversal_ok = row.reversal.empty()
                              ? reverse_opq(row.query) == row.query
                              : equivalent(q, opq_query(row.reversal, relation));
        if (row.minimal.empty()) {
            row.minimal_ok = is_minimal(q);
        } else {
            auto cored = core(q);
            auto target = opq_query(row.minimal, relation);
            row.minimal_ok =
                cored.body.size() == target.body.size() && equivalent(cored, target);
        }
        report.passed = report.passed && row.ok();
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace cqd
