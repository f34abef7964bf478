#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ccql/errors.hpp"
#include "ccql/value.hpp"

namespace ccql {

enum class Multiplicity { Single, List };

struct AttrDef {
    std::string name;
    ValueKind kind;
    Multiplicity multiplicity;
    std::string ref_class;  // target class for RefList attributes, else empty
};

// The common data model: a fixed catalog of classes and typed attributes
// covering chain, block, account and transaction concepts across UTXO-,
// account- and DAG-structured ledgers.
class SchemaCatalog {
public:
    static const SchemaCatalog& instance() {
        static const SchemaCatalog catalog;
        return catalog;
    }

    const std::vector<std::string>& class_names() const { return class_order_; }

    // Resolves a class name or one of its accepted abbreviations to the
    // canonical class name; nullptr when unknown.
    const std::string* canonical_class(const std::string& name) const {
        auto alias = aliases_.find(name);
        const std::string& target = alias == aliases_.end() ? name : alias->second;
        auto it = classes_.find(target);
        return it == classes_.end() ? nullptr : &it->first;
    }

    const std::vector<AttrDef>& attrs(const std::string& class_name) const {
        const std::string* canonical = canonical_class(class_name);
        if (canonical == nullptr) throw UnknownClass(class_name);
        return classes_.at(*canonical);
    }

    const AttrDef& resolve_attr(const std::string& class_name,
                                const std::string& attr_name) const {
        for (const AttrDef& def : attrs(class_name)) {
            if (def.name == attr_name) return def;
        }
        throw UnknownAttribute(class_name, attr_name);
    }

private:
    SchemaCatalog() {
        auto add = [this](std::string name, std::vector<AttrDef> attrs) {
            class_order_.push_back(name);
            classes_.emplace(std::move(name), std::move(attrs));
        };
        using VK = ValueKind;
        using M = Multiplicity;
        add("Chain", {{"id", VK::String, M::Single, ""},
                      {"name", VK::String, M::Single, ""}});
        add("Network", {{"id", VK::String, M::Single, ""},
                        {"name", VK::String, M::Single, ""},
                        {"isTest", VK::Bool, M::Single, ""}});
        add("ChainDescriptor", {{"id", VK::String, M::Single, ""},
                                {"dataStructure", VK::String, M::Single, ""},
                                {"consensus", VK::String, M::Single, ""}});
        add("Block", {{"id", VK::Hash, M::Single, ""},
                      {"height", VK::Int, M::Single, ""},
                      {"timestamp", VK::Timestamp, M::Single, ""},
                      {"linkDescriptor", VK::HashList, M::List, ""},
                      {"linkedBlockDescriptor", VK::HashList, M::List, ""}});
        add("BlockDescriptor", {{"id", VK::Hash, M::Single, ""},
                                {"transactions", VK::HashList, M::List, ""},
                                {"status", VK::String, M::Single, ""},
                                {"dagSupport", VK::Bool, M::Single, ""},
                                {"epoch", VK::Int, M::Single, ""},
                                {"slot", VK::Int, M::Single, ""}});
        add("ValidationDescriptor",
            {{"id", VK::String, M::Single, ""},
             {"hashValue", VK::Hash, M::Single, ""},
             {"proposer", VK::Address, M::Single, ""},
             {"attestations", VK::RefList, M::List, "ValidatorDescriptor"}});
        add("ValidatorDescriptor", {{"id", VK::Address, M::Single, ""},
                                    {"vote", VK::String, M::Single, ""},
                                    {"signature", VK::Bytes, M::Single, ""}});
        add("Account", {{"id", VK::Address, M::Single, ""},
                        {"balance", VK::Amount, M::Single, ""}});
        add("Asset", {{"id", VK::String, M::Single, ""},
                      {"name", VK::String, M::Single, ""},
                      {"amount", VK::Amount, M::Single, ""}});
        add("Token", {{"id", VK::Address, M::Single, ""},
                      {"standard", VK::String, M::Single, ""},
                      {"name", VK::String, M::Single, ""},
                      {"symbol", VK::String, M::Single, ""},
                      {"decimals", VK::Int, M::Single, ""},
                      {"balance", VK::Amount, M::Single, ""}});
        add("Data", {{"id", VK::String, M::Single, ""},
                     {"kind", VK::String, M::Single, ""},
                     {"payload", VK::Bytes, M::Single, ""}});
        add("Transaction", {{"id", VK::Hash, M::Single, ""},
                            {"from", VK::Address, M::Single, ""},
                            {"to", VK::Address, M::Single, ""},
                            {"value", VK::Amount, M::Single, ""}});
        add("TransactionDescriptor",
            {{"id", VK::Hash, M::Single, ""},
             {"data", VK::Bytes, M::Single, ""},
             {"assets", VK::RefList, M::List, "Asset"},
             {"tokens", VK::RefList, M::List, "Token"},
             {"utxoInputs", VK::RefList, M::List, "UTXO"},
             {"utxoOutputs", VK::RefList, M::List, "UTXO"}});
        add("UTXO", {{"id", VK::String, M::Single, ""},
                     {"value", VK::Amount, M::Single, ""},
                     {"script", VK::Bytes, M::Single, ""},
                     {"spent", VK::Bool, M::Single, ""}});

        aliases_ = {{"BlockDesc", "BlockDescriptor"},
                    {"ChainDesc", "ChainDescriptor"},
                    {"ValidationDesc", "ValidationDescriptor"},
                    {"ValidatorDesc", "ValidatorDescriptor"},
                    {"TxDesc", "TransactionDescriptor"},
                    {"Tx", "Transaction"}};
    }

    std::vector<std::string> class_order_;
    std::map<std::string, std::vector<AttrDef>> classes_;
    std::map<std::string, std::string> aliases_;
};

inline const AttrDef& resolve_attr(const std::string& class_name,
                                   const std::string& attr_name) {
    return SchemaCatalog::instance().resolve_attr(class_name, attr_name);
}

// One materialized data-model object, as emitted by an adapter.
struct Instance {
    std::string class_name;  // canonical
    std::map<std::string, Value> attributes;
    int source_index = 0;

    const Value& attr(const std::string& name) const {
        static const Value null_value{};
        auto it = attributes.find(name);
        return it == attributes.end() ? null_value : it->second;
    }

    const std::string* id() const {
        auto it = attributes.find("id");
        if (it == attributes.end()) return nullptr;
        return std::get_if<std::string>(&it->second);
    }
};

struct InstanceSet {
    std::map<std::pair<int, std::string>, std::vector<Instance>> by_source_and_class;

    void add(Instance inst) {
        by_source_and_class[{inst.source_index, inst.class_name}].push_back(
            std::move(inst));
    }

    const std::vector<Instance>* list(int source, const std::string& class_name) const {
        auto it = by_source_and_class.find({source, class_name});
        return it == by_source_and_class.end() ? nullptr : &it->second;
    }
};

inline bool value_matches_kind(const Value& v, ValueKind kind) {
    if (is_null(v)) return true;
    switch (kind) {
        case ValueKind::Int:
        case ValueKind::Timestamp:
            return std::holds_alternative<std::int64_t>(v);
        case ValueKind::Amount:
            return std::holds_alternative<Amount>(v);
        case ValueKind::String:
        case ValueKind::Address:
            return std::holds_alternative<std::string>(v);
        case ValueKind::Hash: {
            const auto* s = std::get_if<std::string>(&v);
            return s != nullptr && is_hex_hash(*s);
        }
        case ValueKind::Bool:
            return std::holds_alternative<bool>(v);
        case ValueKind::Bytes:
            return std::holds_alternative<Bytes>(v);
        case ValueKind::HashList: {
            const auto* l = std::get_if<StringList>(&v);
            if (l == nullptr) return false;
            for (const std::string& s : *l) {
                if (!is_hex_hash(s)) return false;
            }
            return true;
        }
        case ValueKind::RefList:
            return std::holds_alternative<StringList>(v);
    }
    return false;
}

// Reports every catalog violation in the instance; empty result means valid.
inline std::vector<std::string> check_instance(const Instance& inst) {
    std::vector<std::string> violations;
    const auto& catalog = SchemaCatalog::instance();
    const std::string* canonical = catalog.canonical_class(inst.class_name);
    if (canonical == nullptr) {
        violations.push_back("unknown class " + inst.class_name);
        return violations;
    }
    const auto& defs = catalog.attrs(*canonical);
    for (const auto& [name, value] : inst.attributes) {
        const AttrDef* def = nullptr;
        for (const AttrDef& d : defs) {
            if (d.name == name) {
                def = &d;
                break;
            }
        }
        if (def == nullptr) {
            violations.push_back(inst.class_name + "." + name + ": not in catalog");
            continue;
        }
        if (!value_matches_kind(value, def->kind)) {
            violations.push_back(inst.class_name + "." + name + ": kind mismatch, expected " +
                                 kind_name(def->kind));
        }
    }
    if (is_null(inst.attr("id"))) {
        violations.push_back(inst.class_name + ".id: identifying attribute is null");
    }
    return violations;
}

// Which catalog classes a given chain's data model populates. Derived from
// the per-chain support matrix of the data model; unknown chains are
// unrestricted.
struct ChainProfile {
    std::set<std::string> classes;

    bool allows(const std::string& class_name) const {
        return classes.count(class_name) != 0;
    }
    bool supports_accounts() const { return allows("Account"); }
};

inline const ChainProfile* chain_profile(const std::string& chain_id,
                                         const std::string& chain_descriptor_id) {
    static const std::set<std::string> core = {
        "Chain",       "Network",     "ChainDescriptor",       "Block",
        "BlockDescriptor", "ValidationDescriptor", "Transaction", "TransactionDescriptor"};
    auto with = [](std::set<std::string> base,
                   std::initializer_list<const char*> extra) {
        for (const char* c : extra) base.insert(c);
        return ChainProfile{std::move(base)};
    };
    static const ChainProfile btc = with(core, {"UTXO"});
    static const ChainProfile eth = with(core, {"Account", "Token", "Data"});
    static const ChainProfile ada =
        with(core, {"ValidatorDescriptor", "Account", "Asset", "Data", "UTXO"});
    static const ChainProfile sol =
        with(core, {"ValidatorDescriptor", "Account", "Token", "Data"});
    static const ChainProfile avax_p = with(core, {"ValidatorDescriptor"});
    static const ChainProfile avax_x =
        with(core, {"ValidatorDescriptor", "UTXO", "Asset"});
    static const ChainProfile avax_c =
        with(core, {"ValidatorDescriptor", "Account", "Token", "Data"});

    if (chain_id == "btc" || chain_id == "syn_utxo") return &btc;
    if (chain_id == "eth" || chain_id == "syn_account") return &eth;
    if (chain_id == "ada") return &ada;
    if (chain_id == "sol") return &sol;
    if (chain_id == "syn_dag") return &avax_x;
    if (chain_id == "avax") {
        if (chain_descriptor_id == "p") return &avax_p;
        if (chain_descriptor_id == "x") return &avax_x;
        return &avax_c;
    }
    return nullptr;
}

inline bool class_applicable(const std::string& chain_id,
                             const std::string& chain_descriptor_id,
                             const std::string& class_name) {
    const ChainProfile* profile = chain_profile(chain_id, chain_descriptor_id);
    return profile == nullptr || profile->allows(class_name);
}

}  // namespace ccql
