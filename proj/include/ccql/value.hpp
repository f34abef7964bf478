#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ccql/errors.hpp"

namespace ccql {

// Exact integer in the chain's smallest unit (satoshi, wei, lovelace, ...).
using Amount = boost::multiprecision::cpp_int;

using Bytes = std::vector<std::uint8_t>;
using StringList = std::vector<std::string>;

// A typed attribute value. monostate is the null value; the catalog's
// ValueKind decides how the populated alternatives are interpreted.
using Value = std::variant<std::monostate, std::int64_t, Amount, std::string, bool,
                           Bytes, StringList>;

enum class ValueKind {
    Int,
    String,
    Hash,
    Address,
    Timestamp,
    Amount,
    Bool,
    Bytes,
    HashList,
    RefList,
};

inline bool is_null(const Value& v) {
    return std::holds_alternative<std::monostate>(v);
}

inline const char* kind_name(ValueKind k) {
    switch (k) {
        case ValueKind::Int: return "INT";
        case ValueKind::String: return "STRING";
        case ValueKind::Hash: return "HASH";
        case ValueKind::Address: return "ADDRESS";
        case ValueKind::Timestamp: return "TIMESTAMP";
        case ValueKind::Amount: return "AMOUNT";
        case ValueKind::Bool: return "BOOL";
        case ValueKind::Bytes: return "BYTES";
        case ValueKind::HashList: return "LIST_OF_HASH";
        case ValueKind::RefList: return "LIST_OF_REF";
    }
    return "?";
}

inline ValueKind kind_from_name(std::string_view name) {
    for (ValueKind k : {ValueKind::Int, ValueKind::String, ValueKind::Hash,
                        ValueKind::Address, ValueKind::Timestamp, ValueKind::Amount,
                        ValueKind::Bool, ValueKind::Bytes, ValueKind::HashList,
                        ValueKind::RefList}) {
        if (name == kind_name(k)) return k;
    }
    throw ParseError("unknown value kind: " + std::string(name));
}

inline bool is_hex_digit(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
}

// 0x-prefixed lowercase hex, at least one digit.
inline bool is_hex_hash(std::string_view s) {
    if (s.size() < 3 || s[0] != '0' || s[1] != 'x') return false;
    for (char c : s.substr(2)) {
        if (!is_hex_digit(c)) return false;
    }
    return true;
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

inline Amount amount_from_decimal(std::string_view s) {
    if (s.empty()) throw ParseError("empty amount");
    std::size_t i = s[0] == '-' ? 1 : 0;
    if (i == s.size()) throw ParseError("malformed amount: " + std::string(s));
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') throw ParseError("malformed amount: " + std::string(s));
    }
    return Amount(std::string(s));
}

inline Bytes bytes_from_hex(std::string_view s) {
    if (!is_hex_hash(s) || s.size() % 2 != 0) {
        throw ParseError("malformed byte string: " + std::string(s));
    }
    auto nibble = [](char c) -> std::uint8_t {
        return c <= '9' ? static_cast<std::uint8_t>(c - '0')
                        : static_cast<std::uint8_t>(c - 'a' + 10);
    };
    Bytes out;
    out.reserve((s.size() - 2) / 2);
    for (std::size_t i = 2; i < s.size(); i += 2) {
        out.push_back(static_cast<std::uint8_t>(nibble(s[i]) << 4 | nibble(s[i + 1])));
    }
    return out;
}

inline std::string hex_from_bytes(const Bytes& b) {
    static const char* digits = "0123456789abcdef";
    std::string out = "0x";
    out.reserve(2 + b.size() * 2);
    for (std::uint8_t byte : b) {
        out.push_back(digits[byte >> 4]);
        out.push_back(digits[byte & 0x0f]);
    }
    return out;
}

}  // namespace ccql
