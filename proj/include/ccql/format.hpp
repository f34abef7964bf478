#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ccql/engine.hpp"
#include "ccql/value.hpp"

namespace ccql {

enum class OutputFormat { Table, Csv, Json };

inline OutputFormat output_format_from_name(const std::string& name) {
    if (name == "table") return OutputFormat::Table;
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    throw InvalidParams("unknown output format: " + name);
}

namespace format_detail {

inline std::string plain(const Value& v) {
    if (is_null(v)) return "";
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    if (const auto* a = std::get_if<Amount>(&v)) return a->str();
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
    if (const auto* bytes = std::get_if<Bytes>(&v)) return hex_from_bytes(*bytes);
    const auto& list = std::get<StringList>(v);
    std::string out = "[";
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (i > 0) out += ", ";
        out += list[i];
    }
    out += "]";
    return out;
}

// Hash display form of the interactive table: 10 characters then a marker.
// Machine formats never truncate.
inline std::string truncate_hash(const std::string& s) {
    if (s.size() <= 10) return s;
    return s.substr(0, 10) + "[…]";
}

inline std::string display(const Value& v, ValueKind kind) {
    if (is_null(v)) return "";
    if (kind == ValueKind::Hash) return truncate_hash(plain(v));
    if (kind == ValueKind::HashList) {
        const auto& list = std::get<StringList>(v);
        std::string out = "[";
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (i > 0) out += ", ";
            out += truncate_hash(list[i]);
        }
        out += "]";
        return out;
    }
    return plain(v);
}

inline std::string csv_escape(const Value& v, const std::string& text) {
    bool is_empty_string = !is_null(v) && text.empty();
    bool needs_quotes = is_empty_string;
    for (char c : text) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') {
            needs_quotes = true;
            break;
        }
    }
    if (!needs_quotes) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

}  // namespace format_detail

// Fixed-width console table. HASH cells are shortened for readability; use
// csv or json for exact values.
inline std::string render_table(const ResultTable& table) {
    namespace fd = format_detail;
    // the ellipsis of the truncation marker is 3 bytes but 1 display column
    auto display_size = [](const std::string& s) {
        std::size_t size = s.size();
        for (std::size_t pos = s.find("…"); pos != std::string::npos;
             pos = s.find("…", pos + 3)) {
            size -= 2;
        }
        return size;
    };
    std::vector<std::size_t> widths(table.columns.size());
    std::vector<std::vector<std::string>> cells;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        widths[c] = table.columns[c].name.size();
    }
    for (const auto& row : table.rows) {
        std::vector<std::string> line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            line.push_back(fd::display(row[c], table.columns[c].kind));
            widths[c] = std::max(widths[c], display_size(line.back()));
        }
        cells.push_back(std::move(line));
    }
    auto pad = [](const std::string& s, std::size_t size, std::size_t width) {
        std::string out = s;
        for (std::size_t i = size; i < width; ++i) out += ' ';
        return out;
    };
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c > 0) out += " | ";
        out += pad(table.columns[c].name, table.columns[c].name.size(), widths[c]);
    }
    out += "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c > 0) out += "-+-";
        out += std::string(widths[c], '-');
    }
    out += "\n";
    for (const auto& line : cells) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            if (c > 0) out += " | ";
            out += pad(line[c], display_size(line[c]), widths[c]);
        }
        out += "\n";
    }
    return out;
}

// RFC-4180-quoted CSV. Null cells are unquoted-empty, empty strings are
// quoted-empty; list cells serialize into one quoted cell.
inline std::string render_csv(const ResultTable& table) {
    namespace fd = format_detail;
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c > 0) out += ",";
        out += fd::csv_escape(Value(table.columns[c].name), table.columns[c].name);
    }
    out += "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out += ",";
            out += fd::csv_escape(row[c], fd::plain(row[c]));
        }
        out += "\n";
    }
    return out;
}

inline nlohmann::json value_to_json(const Value& v) {
    using nlohmann::json;
    if (is_null(v)) return nullptr;
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    if (const auto* a = std::get_if<Amount>(&v)) return a->str();  // exact, no precision loss
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    if (const auto* b = std::get_if<bool>(&v)) return *b;
    if (const auto* bytes = std::get_if<Bytes>(&v)) return hex_from_bytes(*bytes);
    return std::get<StringList>(v);
}

inline std::string render_json(const ResultTable& table) {
    using nlohmann::json;
    json doc;
    doc["columns"] = json::array();
    for (const Column& col : table.columns) {
        doc["columns"].push_back(
            {{"name", col.name},
             {"kind", kind_name(col.kind)},
             {"multiplicity", col.multiplicity == Multiplicity::List ? "list" : "single"}});
    }
    doc["rows"] = json::array();
    for (const auto& row : table.rows) {
        json jrow = json::array();
        for (const Value& v : row) jrow.push_back(value_to_json(v));
        doc["rows"].push_back(std::move(jrow));
    }
    return doc.dump(2) + "\n";
}

inline std::string render(const ResultTable& table, OutputFormat format) {
    switch (format) {
        case OutputFormat::Table: return render_table(table);
        case OutputFormat::Csv: return render_csv(table);
        case OutputFormat::Json: return render_json(table);
    }
    return "";
}

}  // namespace ccql
