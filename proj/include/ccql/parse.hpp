#pragma once

#include <cctype>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "ccql/ast.hpp"
#include "ccql/errors.hpp"
#include "ccql/value.hpp"

namespace ccql {

enum class TokenType {
    Ident,      // class, attribute, keyword, chain/network tokens
    Number,     // optionally signed decimal integer
    HexString,  // 0x-prefixed hex, lowercased
    StringLit,  // single-quoted, quotes stripped
    Anchor,     // b/..., t/..., a/...
    Comma,
    Dot,
    Colon,
    Semicolon,
    Cmp,
    End,
};

struct Token {
    TokenType type = TokenType::End;
    std::string text;        // canonical token text
    std::size_t offset = 0;  // 1-based character offset in the input
    AnchorKind anchor_kind = AnchorKind::Block;
    std::string anchor_id;
    Comparison cmp = Comparison::Eq;
};

// Splits statement text into tokens. Whitespace between tokens is
// insignificant. Throws SyntaxError on characters outside the grammar.
inline std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto is_ident_start = [](char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    };
    auto is_ident_char = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    };
    auto is_alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)); };

    while (i < n) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++i;
            continue;
        }
        Token tok;
        tok.offset = i + 1;
        // entity anchors: one-letter kind prefix, '/', identifier
        if ((c == 'b' || c == 't' || c == 'a') && i + 1 < n && text[i + 1] == '/') {
            tok.type = TokenType::Anchor;
            tok.anchor_kind = c == 'b'   ? AnchorKind::Block
                              : c == 't' ? AnchorKind::Transaction
                                         : AnchorKind::Account;
            std::size_t j = i + 2;
            while (j < n && is_alnum(text[j])) ++j;
            if (j == i + 2) {
                throw SyntaxError(i + 3, "entity identifier after '" +
                                             std::string(1, c) + "/'",
                                  j < n ? "'" + std::string(1, text[j]) + "'"
                                        : "end of input");
            }
            std::string id(text.substr(i + 2, j - i - 2));
            if (id.size() > 2 && (id[0] == '0') && (id[1] == 'x' || id[1] == 'X')) {
                id = to_lower(id);  // hex identifiers are case-normalized
            }
            tok.anchor_id = id;
            tok.text = std::string(1, c) + "/" + id;
            i = j;
        } else if (is_ident_start(c)) {
            std::size_t j = i;
            while (j < n && is_ident_char(text[j])) ++j;
            tok.type = TokenType::Ident;
            tok.text = std::string(text.substr(i, j - i));
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '-' && i + 1 < n &&
                    std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            std::size_t j = i + (c == '-' ? 1 : 0);
            // 0x... lexes as a hex string, not a number
            if (text[j] == '0' && j + 1 < n && (text[j + 1] == 'x' || text[j + 1] == 'X') &&
                c != '-') {
                std::size_t k = j + 2;
                while (k < n && std::isxdigit(static_cast<unsigned char>(text[k]))) ++k;
                if (k == j + 2) {
                    throw SyntaxError(i + 1, "hex digits after 0x", "'0x'");
                }
                tok.type = TokenType::HexString;
                tok.text = to_lower(text.substr(i, k - i));
                i = k;
            } else {
                while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
                tok.type = TokenType::Number;
                tok.text = std::string(text.substr(i, j - i));
                i = j;
            }
        } else if (c == '\'') {
            std::size_t j = i + 1;
            while (j < n && text[j] != '\'') ++j;
            if (j == n) {
                throw SyntaxError(i + 1, "closing ' for string literal", "end of input");
            }
            tok.type = TokenType::StringLit;
            tok.text = std::string(text.substr(i + 1, j - i - 1));
            i = j + 1;
        } else if (c == ',') {
            tok.type = TokenType::Comma;
            tok.text = ",";
            ++i;
        } else if (c == '.') {
            tok.type = TokenType::Dot;
            tok.text = ".";
            ++i;
        } else if (c == ':') {
            tok.type = TokenType::Colon;
            tok.text = ":";
            ++i;
        } else if (c == ';') {
            tok.type = TokenType::Semicolon;
            tok.text = ";";
            ++i;
        } else if (c == '=' || c == '!' || c == '<' || c == '>') {
            tok.type = TokenType::Cmp;
            bool has_eq = i + 1 < n && text[i + 1] == '=';
            switch (c) {
                case '=': tok.cmp = Comparison::Eq; has_eq = false; break;
                case '!':
                    if (!has_eq) {
                        throw SyntaxError(i + 1, "'=' after '!'",
                                          "'" + std::string(1, c) + "'");
                    }
                    tok.cmp = Comparison::Neq;
                    break;
                case '<': tok.cmp = has_eq ? Comparison::Lte : Comparison::Lt; break;
                case '>': tok.cmp = has_eq ? Comparison::Gte : Comparison::Gt; break;
            }
            tok.text = comparison_token(tok.cmp);
            i += has_eq ? 2 : 1;
        } else {
            throw SyntaxError(i + 1, "a statement token",
                              "'" + std::string(1, c) + "'");
        }
        tokens.push_back(std::move(tok));
    }
    Token end;
    end.type = TokenType::End;
    end.text = "end of input";
    end.offset = n + 1;
    tokens.push_back(std::move(end));
    return tokens;
}

namespace detail {

class StatementParser {
public:
    explicit StatementParser(std::string_view text) : tokens_(tokenize(text)) {}

    QueryStatement parse() {
        QueryStatement stmt;
        expect_keyword("Q");
        stmt.query_attrs.push_back(parse_attr_spec());
        while (at(TokenType::Comma)) {
            advance();
            stmt.query_attrs.push_back(parse_attr_spec());
        }
        expect_keyword("S");
        stmt.sources.push_back(parse_source_spec());
        while (at(TokenType::Comma)) {
            advance();
            stmt.sources.push_back(parse_source_spec());
        }
        if (at_keyword("F")) {
            advance();
            stmt.filters.push_back(parse_filter_spec());
            while (at(TokenType::Comma)) {
                advance();
                stmt.filters.push_back(parse_filter_spec());
            }
        }
        if (!at(TokenType::Semicolon)) {
            fail("';'");
        }
        advance();
        if (!at(TokenType::End)) {
            fail("end of statement after ';'");
        }
        return stmt;
    }

private:
    const Token& cur() const { return tokens_[pos_]; }
    const Token& peek() const {
        return tokens_[pos_ + 1 < tokens_.size() ? pos_ + 1 : tokens_.size() - 1];
    }
    bool at(TokenType t) const { return cur().type == t; }
    bool at_keyword(const char* kw) const {
        return cur().type == TokenType::Ident && cur().text == kw;
    }
    void advance() {
        if (pos_ + 1 < tokens_.size()) ++pos_;
    }

    [[noreturn]] void fail(const std::string& expected) const {
        const Token& t = cur();
        std::string found = t.type == TokenType::End ? "end of input" : "'" + t.text + "'";
        throw SyntaxError(t.offset, expected, found);
    }

    void expect_keyword(const char* kw) {
        if (!at_keyword(kw)) fail(std::string("'") + kw + "'");
        advance();
    }

    std::string expect_ident(const std::string& what) {
        if (!at(TokenType::Ident)) fail(what);
        std::string text = cur().text;
        advance();
        return text;
    }

    void expect_dot() {
        if (!at(TokenType::Dot)) fail("'.'");
        advance();
    }

    AttrSpec parse_attr_spec() {
        AttrSpec attr;
        attr.class_name = expect_ident("class name");
        expect_dot();
        attr.attr_name = expect_ident("attribute name");
        return attr;
    }

    // chain, network and chain-descriptor tokens are lowercase identifiers
    // or plain numbers
    std::string parse_source_token() {
        if (at(TokenType::Number)) {
            std::string text = cur().text;
            advance();
            return text;
        }
        if (at(TokenType::Ident)) {
            for (char c : cur().text) {
                if (c >= 'A' && c <= 'Z') {
                    fail("lowercase source token");
                }
            }
            std::string text = cur().text;
            advance();
            return text;
        }
        fail("source token");
    }

    void expect_colon() {
        if (!at(TokenType::Colon)) fail("':'");
        advance();
    }

    SourceSpec parse_source_spec() {
        SourceSpec src;
        src.chain = parse_source_token();
        expect_colon();
        src.network = parse_source_token();
        expect_colon();
        src.chain_descriptor = parse_source_token();
        if (at(TokenType::Colon)) {
            advance();
            if (!at(TokenType::Anchor)) {
                fail("entity anchor (b/..., t/... or a/...)");
            }
            EntityAnchor anchor;
            anchor.kind = cur().anchor_kind;
            anchor.identifier = cur().anchor_id;
            validate_anchor(anchor);
            advance();
            src.anchor = anchor;
        }
        return src;
    }

    void validate_anchor(const EntityAnchor& anchor) {
        const std::string& id = anchor.identifier;
        bool all_digits = !id.empty();
        for (char c : id) {
            if (!std::isdigit(static_cast<unsigned char>(c))) all_digits = false;
        }
        switch (anchor.kind) {
            case AnchorKind::Block:
                if (!all_digits && !is_hex_hash(id)) {
                    fail("block height or 0x-hex block hash");
                }
                break;
            case AnchorKind::Transaction:
                if (!is_hex_hash(id)) fail("0x-hex transaction hash");
                break;
            case AnchorKind::Account:
                break;  // address shapes are chain specific
        }
    }

    FilterAttr parse_filter_attr() {
        FilterAttr attr;
        if (at(TokenType::Number) && peek().type == TokenType::Dot) {
            try {
                attr.source_index = std::stoi(cur().text);
            } catch (const std::exception&) {
                fail("source index");
            }
            advance();
            advance();
        }
        attr.class_name = expect_ident("class name");
        expect_dot();
        attr.attr_name = expect_ident("attribute name");
        return attr;
    }

    Value parse_literal() {
        if (at(TokenType::Number)) {
            Amount big = amount_from_decimal(cur().text);
            advance();
            if (big >= std::numeric_limits<std::int64_t>::min() &&
                big <= std::numeric_limits<std::int64_t>::max()) {
                return Value(static_cast<std::int64_t>(big));
            }
            return Value(big);
        }
        if (at(TokenType::HexString) || at(TokenType::StringLit)) {
            Value v(cur().text);
            advance();
            return v;
        }
        if (at_keyword("true") || at_keyword("false")) {
            Value v(cur().text == "true");
            advance();
            return v;
        }
        fail("literal value");
    }

    FilterSpec parse_filter_spec() {
        FilterSpec filter;
        filter.left = parse_filter_attr();
        if (!at(TokenType::Cmp)) {
            fail("comparison (=, !=, <, <=, >, >=)");
        }
        filter.cmp = cur().cmp;
        advance();
        // right side: attribute reference or literal
        bool rhs_attr = (at(TokenType::Ident) && !at_keyword("true") && !at_keyword("false") &&
                         peek().type == TokenType::Dot) ||
                        (at(TokenType::Number) && peek().type == TokenType::Dot);
        if (rhs_attr) {
            filter.right = parse_filter_attr();
        } else {
            filter.right = parse_literal();
        }
        return filter;
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

}  // namespace detail

// Parses one complete statement. No schema validation happens here; class
// and attribute names are checked against the catalog at planning time.
inline QueryStatement parse(std::string_view text) {
    return detail::StatementParser(text).parse();
}

}  // namespace ccql
