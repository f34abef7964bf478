#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ccql/value.hpp"

namespace ccql {

// Abstract syntax of one statement: Q (projection attributes), S (sources),
// F (filters). Names are kept exactly as written; catalog resolution happens
// at planning time.

struct AttrSpec {
    std::string class_name;
    std::string attr_name;

    bool operator==(const AttrSpec&) const = default;
};

enum class AnchorKind { Block, Transaction, Account };

struct EntityAnchor {
    AnchorKind kind = AnchorKind::Block;
    std::string identifier;

    bool operator==(const EntityAnchor&) const = default;
};

struct SourceSpec {
    std::string chain;
    std::string network;
    std::string chain_descriptor;
    std::optional<EntityAnchor> anchor;

    bool operator==(const SourceSpec&) const = default;

    std::string triple() const { return chain + ":" + network + ":" + chain_descriptor; }
};

enum class Comparison { Eq, Neq, Lt, Lte, Gt, Gte };

inline const char* comparison_token(Comparison c) {
    switch (c) {
        case Comparison::Eq: return "=";
        case Comparison::Neq: return "!=";
        case Comparison::Lt: return "<";
        case Comparison::Lte: return "<=";
        case Comparison::Gt: return ">";
        case Comparison::Gte: return ">=";
    }
    return "?";
}

// Attribute reference inside a filter; the optional source index pins it to
// one source of the S clause (1-based).
struct FilterAttr {
    std::optional<int> source_index;
    std::string class_name;
    std::string attr_name;

    bool operator==(const FilterAttr&) const = default;
};

struct FilterSpec {
    FilterAttr left;
    Comparison cmp = Comparison::Eq;
    std::variant<Value, FilterAttr> right;

    bool operator==(const FilterSpec&) const = default;
};

struct QueryStatement {
    std::vector<AttrSpec> query_attrs;  // >= 1
    std::vector<SourceSpec> sources;    // >= 1
    std::vector<FilterSpec> filters;    // order as written

    bool operator==(const QueryStatement&) const = default;
};

namespace detail {

inline void render_anchor(const EntityAnchor& a, std::string& out) {
    switch (a.kind) {
        case AnchorKind::Block: out += "b/"; break;
        case AnchorKind::Transaction: out += "t/"; break;
        case AnchorKind::Account: out += "a/"; break;
    }
    out += a.identifier;
}

inline void render_literal(const Value& v, std::string& out) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
        out += std::to_string(*i);
    } else if (const auto* a = std::get_if<Amount>(&v)) {
        out += a->str();
    } else if (const auto* b = std::get_if<bool>(&v)) {
        out += *b ? "true" : "false";
    } else if (const auto* s = std::get_if<std::string>(&v)) {
        if (is_hex_hash(*s)) {
            out += *s;
        } else {
            out += '\'';
            out += *s;
            out += '\'';
        }
    }
}

inline void render_filter_attr(const FilterAttr& fa, std::string& out) {
    if (fa.source_index) {
        out += std::to_string(*fa.source_index);
        out += '.';
    }
    out += fa.class_name;
    out += '.';
    out += fa.attr_name;
}

}  // namespace detail

// Canonical statement text: single spaces, ", " between list items, "Q"/"S"/"F"
// clause keywords, trailing ";". parse(render(parse(t))) == parse(t).
inline std::string render(const QueryStatement& stmt) {
    std::string out = "Q ";
    for (std::size_t i = 0; i < stmt.query_attrs.size(); ++i) {
        if (i > 0) out += ", ";
        out += stmt.query_attrs[i].class_name;
        out += '.';
        out += stmt.query_attrs[i].attr_name;
    }
    out += " S ";
    for (std::size_t i = 0; i < stmt.sources.size(); ++i) {
        if (i > 0) out += ", ";
        const SourceSpec& s = stmt.sources[i];
        out += s.chain;
        out += ':';
        out += s.network;
        out += ':';
        out += s.chain_descriptor;
        if (s.anchor) {
            out += ':';
            detail::render_anchor(*s.anchor, out);
        }
    }
    if (!stmt.filters.empty()) {
        out += " F ";
        for (std::size_t i = 0; i < stmt.filters.size(); ++i) {
            if (i > 0) out += ", ";
            const FilterSpec& f = stmt.filters[i];
            detail::render_filter_attr(f.left, out);
            out += ' ';
            out += comparison_token(f.cmp);
            out += ' ';
            if (const auto* attr = std::get_if<FilterAttr>(&f.right)) {
                detail::render_filter_attr(*attr, out);
            } else {
                detail::render_literal(std::get<Value>(f.right), out);
            }
        }
    }
    out += ';';
    return out;
}

}  // namespace ccql
