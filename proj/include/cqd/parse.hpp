#pragma once

#include <cctype>
#include <string_view>

#include "core.hpp"

namespace cqd {
namespace detail {

struct Token {
    enum class Kind { Ident, Number, LParen, RParen, Comma, Arrow, Period, Slash, End };
    Kind kind = Kind::End;
    std::string text;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { next_token(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        next_token();
        return t;
    }

    Token expect(Token::Kind kind, const char* what) {
        if (tok_.kind != kind) throw ParseError(std::string("expected ") + what, tok_.pos);
        return take();
    }

private:
    static bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }

    void next_token() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        std::size_t start = pos_;
        if (pos_ >= text_.size()) {
            tok_ = {Token::Kind::End, "", start};
            return;
        }
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t end = pos_;
            while (end < text_.size() && ident_char(text_[end])) ++end;
            tok_ = {Token::Kind::Ident, std::string(text_.substr(pos_, end - pos_)), start};
            pos_ = end;
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t end = pos_;
            while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
            tok_ = {Token::Kind::Number, std::string(text_.substr(pos_, end - pos_)), start};
            pos_ = end;
            return;
        }
        switch (c) {
            case '(': tok_ = {Token::Kind::LParen, "(", start}; ++pos_; return;
            case ')': tok_ = {Token::Kind::RParen, ")", start}; ++pos_; return;
            case ',': tok_ = {Token::Kind::Comma, ",", start}; ++pos_; return;
            case '.': tok_ = {Token::Kind::Period, ".", start}; ++pos_; return;
            case '/': tok_ = {Token::Kind::Slash, "/", start}; ++pos_; return;
            case '<':
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
                    tok_ = {Token::Kind::Arrow, "<-", start};
                    pos_ += 2;
                    return;
                }
                throw ParseError("expected '<-'", start);
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", start);
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    Token tok_;
};

inline bool starts_lower(const std::string& s) {
    return !s.empty() && std::islower(static_cast<unsigned char>(s[0]));
}

inline bool starts_upper(const std::string& s) {
    return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

inline std::string lower_ident(Lexer& lx, const char* what) {
    Token t = lx.expect(Token::Kind::Ident, what);
    if (!starts_lower(t.text))
        throw ParseError(std::string("expected ") + what + " (lowercase identifier), got '" + t.text + "'", t.pos);
    return t.text;
}

inline std::string relation_name(Lexer& lx) {
    Token t = lx.expect(Token::Kind::Ident, "a relation name");
    if (!starts_upper(t.text))
        throw ParseError("relation names must begin with an uppercase letter, got '" + t.text + "'", t.pos);
    return t.text;
}

// "(a, b, c)" -> {a, b, c}; "()" -> {}
inline std::vector<std::string> ident_tuple(Lexer& lx, const char* what) {
    lx.expect(Token::Kind::LParen, "'('");
    std::vector<std::string> out;
    if (lx.peek().kind == Token::Kind::RParen) {
        lx.take();
        return out;
    }
    out.push_back(lower_ident(lx, what));
    while (lx.peek().kind == Token::Kind::Comma) {
        lx.take();
        out.push_back(lower_ident(lx, what));
    }
    lx.expect(Token::Kind::RParen, "')'");
    return out;
}

inline ConjunctiveQuery parse_query_impl(std::string_view text, const Schema* schema) {
    Lexer lx(text);
    struct HeadVar { std::string name; std::size_t pos; };
    std::vector<HeadVar> head;
    lx.expect(Token::Kind::LParen, "'(' opening the head");
    if (lx.peek().kind != Token::Kind::RParen) {
        for (;;) {
            Token t = lx.peek();
            head.push_back({lower_ident(lx, "a head variable"), t.pos});
            if (lx.peek().kind != Token::Kind::Comma) break;
            lx.take();
        }
    }
    lx.expect(Token::Kind::RParen, "')'");
    lx.expect(Token::Kind::Arrow, "'<-'");

    std::vector<Atom> body;
    std::map<std::string, std::size_t> seen_arity;
    for (;;) {
        Token at = lx.peek();
        std::string rel = relation_name(lx);
        std::vector<std::string> args = ident_tuple(lx, "a variable");
        if (schema) {
            if (!schema->has(rel)) throw ParseError("unknown relation name: " + rel, at.pos);
            if (schema->arity(rel) != args.size())
                throw ParseError("arity mismatch: " + rel + " takes " +
                                     std::to_string(schema->arity(rel)) + " arguments, got " +
                                     std::to_string(args.size()),
                                 at.pos);
        }
        auto [it, fresh] = seen_arity.emplace(rel, args.size());
        if (!fresh && it->second != args.size())
            throw ParseError("relation " + rel + " used with two different arities", at.pos);
        body.push_back({std::move(rel), std::move(args)});
        if (lx.peek().kind == Token::Kind::Comma) {
            lx.take();
            continue;
        }
        break;
    }
    if (lx.peek().kind == Token::Kind::Period) lx.take();
    lx.expect(Token::Kind::End, "end of input");

    std::set<std::string> body_vars;
    for (const auto& a : body)
        for (const auto& v : a.args) body_vars.insert(v);
    for (const auto& h : head)
        if (!body_vars.contains(h.name))
            throw ParseError("head variable '" + h.name + "' does not occur in the body", h.pos);

    std::vector<std::string> head_names;
    for (auto& h : head) head_names.push_back(std::move(h.name));
    return make_query(std::move(head_names), std::move(body));
}

}  // namespace detail

inline ConjunctiveQuery parse_query(std::string_view text) {
    return detail::parse_query_impl(text, nullptr);
}

inline ConjunctiveQuery parse_query(std::string_view text, const Schema& schema) {
    return detail::parse_query_impl(text, &schema);
}

// Query files hold one query per line; blank lines separate entries.
inline std::vector<ConjunctiveQuery> parse_queries(std::string_view text) {
    std::vector<ConjunctiveQuery> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
        if (!blank) out.push_back(parse_query(line));
        if (end == text.size()) break;
        start = end + 1;
    }
    return out;
}

inline Instance parse_instance_impl(std::string_view text, const Schema* schema) {
    detail::Lexer lx(text);
    Instance inst;
    std::map<std::string, std::size_t> seen_arity;
    while (lx.peek().kind != detail::Token::Kind::End) {
        detail::Token at = lx.peek();
        std::string rel = detail::relation_name(lx);
        std::vector<std::string> args = detail::ident_tuple(lx, "a constant");
        if (schema) {
            if (!schema->has(rel)) throw ParseError("unknown relation name: " + rel, at.pos);
            if (schema->arity(rel) != args.size())
                throw ParseError("arity mismatch: " + rel + " takes " +
                                     std::to_string(schema->arity(rel)) + " arguments, got " +
                                     std::to_string(args.size()),
                                 at.pos);
        }
        auto [it, fresh] = seen_arity.emplace(rel, args.size());
        if (!fresh && it->second != args.size())
            throw ParseError("relation " + rel + " used with two different arities", at.pos);
        inst.facts.insert({std::move(rel), std::move(args)});
        if (lx.peek().kind == detail::Token::Kind::Period) lx.take();
    }
    return inst;
}

inline Instance parse_instance(std::string_view text) {
    return parse_instance_impl(text, nullptr);
}

inline Instance parse_instance(std::string_view text, const Schema& schema) {
    return parse_instance_impl(text, &schema);
}

// Schema files: whitespace-separated "Name/arity" entries.
inline Schema parse_schema(std::string_view text) {
    detail::Lexer lx(text);
    Schema s;
    while (lx.peek().kind != detail::Token::Kind::End) {
        detail::Token at = lx.peek();
        std::string rel = detail::relation_name(lx);
        lx.expect(detail::Token::Kind::Slash, "'/'");
        detail::Token num = lx.expect(detail::Token::Kind::Number, "an arity");
        std::size_t ar = 0;
        for (char c : num.text) ar = ar * 10 + static_cast<std::size_t>(c - '0');
        if (!s.relations.emplace(rel, ar).second)
            throw ParseError("duplicate relation name: " + rel, at.pos);
    }
    if (s.relations.empty()) throw ParseError("empty schema", 0);
    return s;
}

}  // namespace cqd
