#include <unistd.h>

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ccql/engine.hpp"
#include "ccql/format.hpp"
#include "ccql/parse.hpp"
#include "ccql/rpc_http.hpp"
#include "ccql/schema.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSyntax = 1;
constexpr int kExitValidation = 2;
constexpr int kExitAdapter = 3;

int exit_code_for(const ccql::Error& e) {
    switch (e.code()) {
        case ccql::ErrorCode::Syntax: return kExitSyntax;
        case ccql::ErrorCode::Validation: return kExitValidation;
        case ccql::ErrorCode::Adapter: return kExitAdapter;
        case ccql::ErrorCode::Data: return kExitValidation;
    }
    return kExitValidation;
}

std::string schema_document() {
    using nlohmann::json;
    const auto& catalog = ccql::SchemaCatalog::instance();
    json doc;
    doc["classes"] = json::array();
    for (const std::string& cls : catalog.class_names()) {
        json jc;
        jc["name"] = cls;
        jc["attributes"] = json::array();
        for (const ccql::AttrDef& def : catalog.attrs(cls)) {
            json ja;
            ja["name"] = def.name;
            ja["kind"] = ccql::kind_name(def.kind);
            ja["multiplicity"] =
                def.multiplicity == ccql::Multiplicity::List ? "list" : "single";
            if (!def.ref_class.empty()) ja["refClass"] = def.ref_class;
            jc["attributes"].push_back(std::move(ja));
        }
        doc["classes"].push_back(std::move(jc));
    }
    doc["aliases"] = {{"BlockDesc", "BlockDescriptor"},
                      {"ChainDesc", "ChainDescriptor"},
                      {"ValidationDesc", "ValidationDescriptor"},
                      {"ValidatorDesc", "ValidatorDescriptor"},
                      {"Tx", "Transaction"},
                      {"TxDesc", "TransactionDescriptor"}};
    return doc.dump(2) + "\n";
}

int run_one(const std::string& statement, const ccql::SourceRegistry& registry,
            ccql::OutputFormat format) {
    ccql::ResultTable table = ccql::run_statement(statement, registry);
    std::cout << ccql::render(table, format);
    return kExitOk;
}

void print_schema_command(const std::string& arg) {
    const auto& catalog = ccql::SchemaCatalog::instance();
    auto print_class = [&](const std::string& cls) {
        std::cout << cls << "\n";
        for (const ccql::AttrDef& def : catalog.attrs(cls)) {
            std::cout << "  " << def.name << " " << ccql::kind_name(def.kind)
                      << (def.multiplicity == ccql::Multiplicity::List ? " list" : "");
            if (!def.ref_class.empty()) std::cout << " -> " << def.ref_class;
            std::cout << "\n";
        }
    };
    if (arg.empty()) {
        for (const std::string& cls : catalog.class_names()) print_class(cls);
        return;
    }
    const std::string* canonical = catalog.canonical_class(arg);
    if (canonical == nullptr) {
        std::cerr << "unknown class: " << arg << "\n";
        return;
    }
    print_class(*canonical);
}

void print_sources(const ccql::SourceRegistry& registry) {
    for (const ccql::SourceConfigEntry& e : registry.entries()) {
        std::cout << e.triple() << "  " << e.backend << "  " << e.location << "\n";
    }
}

int repl(const ccql::SourceRegistry& registry, ccql::OutputFormat format) {
    const bool interactive = isatty(fileno(stdin)) != 0;
    if (interactive) {
        std::cout << "ccql — statements end with ';'. \\q quits, \\sources lists "
                     "sources, \\schema [Class] prints the catalog.\n";
    }
    std::string buffer;
    std::string line;
    auto statement_end = [](const std::string& text) -> std::optional<std::size_t> {
        bool in_string = false;
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] == '\'') in_string = !in_string;
            else if (text[i] == ';' && !in_string) return i;
        }
        return std::nullopt;
    };
    while (true) {
        if (interactive) std::cout << (buffer.empty() ? "ccql> " : "  ... ") << std::flush;
        if (!std::getline(std::cin, line)) break;
        if (buffer.empty()) {
            std::string trimmed = line;
            while (!trimmed.empty() && trimmed.front() == ' ') trimmed.erase(trimmed.begin());
            if (trimmed == "\\q") break;
            if (trimmed == "\\sources") {
                print_sources(registry);
                continue;
            }
            if (trimmed.rfind("\\schema", 0) == 0) {
                std::string arg = trimmed.substr(7);
                while (!arg.empty() && arg.front() == ' ') arg.erase(arg.begin());
                print_schema_command(arg);
                continue;
            }
            if (trimmed.empty()) continue;
        }
        buffer += buffer.empty() ? line : "\n" + line;
        while (auto end = statement_end(buffer)) {
            std::string statement = buffer.substr(0, *end + 1);
            buffer = buffer.substr(*end + 1);
            try {
                run_one(statement, registry, format);
            } catch (const ccql::Error& e) {
                std::cerr << e.what() << "\n";
            }
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ccql — cross-chain query language"};

    std::string config_path = "./ccql-sources";
    std::string format_name = "table";
    std::string query;
    bool dump_schema = false;
    app.add_option("--config", config_path, "Source-config file")
        ->capture_default_str();
    app.add_option("--format", format_name, "Output format: table, csv or json")
        ->check(CLI::IsMember({"table", "csv", "json"}))
        ->capture_default_str();
    app.add_option("--query,-q", query, "Execute one statement and exit");
    app.add_flag("--dump-schema", dump_schema,
                 "Print the data-model catalog as JSON and exit");

    CLI11_PARSE(app, argc, argv);

    if (dump_schema) {
        std::cout << schema_document();
        return kExitOk;
    }

    ccql::OutputFormat format = ccql::output_format_from_name(format_name);

    ccql::SourceRegistry registry;
    try {
        registry = ccql::SourceRegistry::from_file(config_path, ccql::http_rpc_factory());
    } catch (const ccql::Error& e) {
        std::cerr << e.what() << "\n";
        return exit_code_for(e);
    }

    if (!query.empty()) {
        try {
            return run_one(query, registry, format);
        } catch (const ccql::Error& e) {
            std::cerr << e.what() << "\n";
            return exit_code_for(e);
        }
    }
    return repl(registry, format);
}
