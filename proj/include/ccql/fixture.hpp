#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ccql/errors.hpp"
#include "ccql/schema.hpp"
#include "ccql/value.hpp"

namespace ccql {

// A self-consistent offline chain snapshot standing in for a blockchain node.
// One document per source; amounts are decimal strings, hashes 0x-lowercase
// hex, byte fields 0x-hex strings.

struct ChainRecord {
    std::string id;
    std::string name;
};

struct NetworkRecord {
    std::string id;
    std::string name;
    bool is_test = false;
};

struct ChainDescriptorRecord {
    std::string id;
    std::string data_structure;  // blocks | dag | blocks+dag
    std::string consensus;
};

struct UtxoRecord {
    std::string id;  // <txid>:<outputIndex>
    Amount value;
    Bytes script;
    bool spent = false;
};

struct AssetRecord {
    std::string id;
    std::string name;
    Amount amount;
};

struct TokenRecord {
    std::string id;  // contract address
    std::string standard;
    std::string name;
    std::string symbol;
    std::int64_t decimals = 0;
    std::optional<Amount> balance;
};

struct DataRecord {
    std::string id;
    std::string kind;  // blob | keyvalue
    Bytes payload;
};

struct ValidatorRecord {
    std::string id;  // address
    std::string vote;
    Bytes signature;
};

struct ValidationRecord {
    std::string id;
    std::string hash_value;
    std::optional<std::string> proposer;
    std::vector<std::string> attestations;  // validator ids
};

struct BlockDescriptorRecord {
    std::vector<std::string> transactions;  // tx ids in on-chain order
    std::string status = "main";            // main | orphan | ommer | finalized
    bool dag_support = false;
    std::optional<std::int64_t> epoch;
    std::optional<std::int64_t> slot;
};

struct BlockRecord {
    std::string id;
    std::int64_t height = 0;
    std::int64_t timestamp = 0;
    std::vector<std::string> link_descriptor;  // parent block ids
    std::optional<std::vector<std::string>> linked_block_descriptor;  // DAG tx links
    BlockDescriptorRecord descriptor;
    std::optional<ValidationRecord> validation;
};

struct TransactionRecord {
    std::string id;
    std::optional<std::string> from;
    std::optional<std::string> to;
    std::optional<Amount> value;
    std::optional<Bytes> data;
    std::vector<AssetRecord> assets;
    std::vector<TokenRecord> tokens;
    std::vector<std::string> utxo_inputs;   // ids of consumed outputs
    std::vector<UtxoRecord> utxo_outputs;   // outputs created here
};

struct AccountRecord {
    std::string id;  // address
    std::optional<Amount> balance;
    std::vector<TokenRecord> tokens;
    std::vector<AssetRecord> assets;
    std::vector<DataRecord> data;
};

struct FixtureChain {
    ChainRecord chain;
    NetworkRecord network;
    ChainDescriptorRecord chain_descriptor;
    // Height of the first block. Non-zero for windowed replicas of long
    // chains; the window's first block may then link to an external parent.
    std::int64_t start_height = 0;
    std::vector<BlockRecord> blocks;
    std::map<std::string, TransactionRecord> transactions;
    std::map<std::string, AccountRecord> accounts;
    std::map<std::string, ValidatorRecord> validators;

    // indexes, rebuilt by reindex()
    std::map<std::string, std::size_t> block_by_id;
    std::map<std::int64_t, std::size_t> block_by_height;
    std::map<std::string, std::string> tx_block;  // txid -> containing block id
    std::map<std::string, std::pair<std::string, std::size_t>> utxo_site;

    void reindex() {
        block_by_id.clear();
        block_by_height.clear();
        tx_block.clear();
        utxo_site.clear();
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            block_by_id.emplace(blocks[i].id, i);
            block_by_height.emplace(blocks[i].height, i);
            for (const std::string& txid : blocks[i].descriptor.transactions) {
                tx_block.emplace(txid, blocks[i].id);
            }
        }
        for (const auto& [txid, tx] : transactions) {
            for (std::size_t k = 0; k < tx.utxo_outputs.size(); ++k) {
                utxo_site.emplace(tx.utxo_outputs[k].id, std::make_pair(txid, k));
            }
        }
    }

    const BlockRecord* block_of_tx(const std::string& txid) const {
        auto it = tx_block.find(txid);
        if (it == tx_block.end()) return nullptr;
        return &blocks[block_by_id.at(it->second)];
    }
};

namespace fixture_detail {

using nlohmann::json;

[[noreturn]] inline void bad_value(const std::string& ctx, const std::string& what) {
    throw IntegrityError("value-kind", ctx + ": " + what);
}

inline const json& require(const json& j, const char* key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) bad_value(ctx, std::string("missing field '") + key + "'");
    return *it;
}

inline std::string get_string(const json& j, const char* key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_string()) bad_value(ctx, std::string(key) + " must be a string");
    return v.get<std::string>();
}

inline std::optional<std::string> get_opt_string(const json& j, const char* key,
                                                 const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) bad_value(ctx, std::string(key) + " must be a string or null");
    return it->get<std::string>();
}

inline std::int64_t get_int(const json& j, const char* key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_number_integer()) bad_value(ctx, std::string(key) + " must be an integer");
    return v.get<std::int64_t>();
}

inline std::optional<std::int64_t> get_opt_int(const json& j, const char* key,
                                               const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_integer()) {
        bad_value(ctx, std::string(key) + " must be an integer or null");
    }
    return it->get<std::int64_t>();
}

inline bool get_bool(const json& j, const char* key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_boolean()) bad_value(ctx, std::string(key) + " must be a boolean");
    return v.get<bool>();
}

inline Amount get_amount(const json& j, const char* key, const std::string& ctx) {
    std::string text = get_string(j, key, ctx);
    Amount a;
    try {
        a = amount_from_decimal(text);
    } catch (const ParseError&) {
        bad_value(ctx, std::string(key) + " must be a decimal amount string");
    }
    if (a < 0) bad_value(ctx, std::string(key) + " must be non-negative");
    return a;
}

inline std::optional<Amount> get_opt_amount(const json& j, const char* key,
                                            const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return get_amount(j, key, ctx);
}

inline Bytes get_bytes(const json& j, const char* key, const std::string& ctx) {
    std::string text = get_string(j, key, ctx);
    try {
        return bytes_from_hex(text);
    } catch (const ParseError&) {
        bad_value(ctx, std::string(key) + " must be a 0x-hex byte string");
    }
}

inline std::optional<Bytes> get_opt_bytes(const json& j, const char* key,
                                          const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return get_bytes(j, key, ctx);
}

inline std::vector<std::string> get_string_list(const json& j, const char* key,
                                                const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_array()) bad_value(ctx, std::string(key) + " must be an array");
    std::vector<std::string> out;
    for (const json& e : v) {
        if (!e.is_string()) bad_value(ctx, std::string(key) + " entries must be strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

inline std::string require_hash(std::string s, const std::string& ctx) {
    if (!is_hex_hash(s)) bad_value(ctx, "'" + s + "' is not a 0x-lowercase-hex hash");
    return s;
}

inline TokenRecord parse_token(const json& j, const std::string& ctx) {
    TokenRecord t;
    t.id = get_string(j, "id", ctx);
    t.standard = get_string(j, "standard", ctx);
    t.name = get_string(j, "name", ctx);
    t.symbol = get_string(j, "symbol", ctx);
    t.decimals = get_int(j, "decimals", ctx);
    if (t.decimals < 0) bad_value(ctx, "decimals must be non-negative");
    t.balance = get_opt_amount(j, "balance", ctx);
    if (t.id.empty()) throw IntegrityError("missing-id", ctx + ": token id");
    return t;
}

inline AssetRecord parse_asset(const json& j, const std::string& ctx) {
    AssetRecord a;
    a.id = get_string(j, "id", ctx);
    a.name = get_string(j, "name", ctx);
    a.amount = get_amount(j, "amount", ctx);
    if (a.id.empty()) throw IntegrityError("missing-id", ctx + ": asset id");
    return a;
}

inline DataRecord parse_data(const json& j, const std::string& ctx) {
    DataRecord d;
    d.id = get_string(j, "id", ctx);
    d.kind = get_string(j, "kind", ctx);
    if (d.kind != "blob" && d.kind != "keyvalue") {
        bad_value(ctx, "data kind must be blob or keyvalue");
    }
    d.payload = get_bytes(j, "payload", ctx);
    if (d.id.empty()) throw IntegrityError("missing-id", ctx + ": data id");
    return d;
}

inline json dump_token(const TokenRecord& t) {
    json j;
    j["id"] = t.id;
    j["standard"] = t.standard;
    j["name"] = t.name;
    j["symbol"] = t.symbol;
    j["decimals"] = t.decimals;
    j["balance"] = t.balance ? json(t.balance->str()) : json(nullptr);
    return j;
}

inline json dump_asset(const AssetRecord& a) {
    return json{{"id", a.id}, {"name", a.name}, {"amount", a.amount.str()}};
}

inline json dump_data(const DataRecord& d) {
    return json{{"id", d.id}, {"kind", d.kind}, {"payload", hex_from_bytes(d.payload)}};
}

}  // namespace fixture_detail

inline FixtureChain fixture_from_json(const nlohmann::json& doc) {
    using nlohmann::json;
    namespace fd = fixture_detail;

    if (!doc.is_object()) throw ParseError("fixture document must be a JSON object");
    FixtureChain fc;

    const json& chain = fd::require(doc, "chain", "chain");
    fc.chain.id = fd::get_string(chain, "id", "chain");
    fc.chain.name = fd::get_string(chain, "name", "chain");
    if (fc.chain.id.empty()) throw IntegrityError("missing-id", "chain id");

    const json& network = fd::require(doc, "network", "network");
    fc.network.id = fd::get_string(network, "id", "network");
    fc.network.name = fd::get_string(network, "name", "network");
    fc.network.is_test = fd::get_bool(network, "isTest", "network");
    if (fc.network.id.empty()) throw IntegrityError("missing-id", "network id");

    const json& cd = fd::require(doc, "chainDescriptor", "chainDescriptor");
    fc.chain_descriptor.id = fd::get_string(cd, "id", "chainDescriptor");
    fc.chain_descriptor.data_structure = fd::get_string(cd, "dataStructure", "chainDescriptor");
    fc.chain_descriptor.consensus = fd::get_string(cd, "consensus", "chainDescriptor");
    if (fc.chain_descriptor.id.empty()) throw IntegrityError("missing-id", "chainDescriptor id");
    if (fc.chain_descriptor.data_structure != "blocks" &&
        fc.chain_descriptor.data_structure != "dag" &&
        fc.chain_descriptor.data_structure != "blocks+dag") {
        fd::bad_value("chainDescriptor", "dataStructure must be blocks, dag or blocks+dag");
    }

    if (auto it = doc.find("startHeight"); it != doc.end() && !it->is_null()) {
        if (!it->is_number_integer()) fd::bad_value("startHeight", "must be an integer");
        fc.start_height = it->get<std::int64_t>();
        if (fc.start_height < 0) fd::bad_value("startHeight", "must be non-negative");
    }

    const json& blocks = fd::require(doc, "blocks", "blocks");
    if (!blocks.is_array()) throw ParseError("blocks must be an array");
    for (const json& jb : blocks) {
        BlockRecord b;
        std::string ctx = "block " + fd::get_opt_string(jb, "id", "block").value_or("?");
        b.id = fd::require_hash(fd::get_string(jb, "id", ctx), ctx);
        b.height = fd::get_int(jb, "height", ctx);
        b.timestamp = fd::get_int(jb, "timestamp", ctx);
        b.link_descriptor = fd::get_string_list(jb, "linkDescriptor", ctx);
        for (std::string& h : b.link_descriptor) fd::require_hash(h, ctx);
        if (auto it = jb.find("linkedBlockDescriptor"); it != jb.end() && !it->is_null()) {
            b.linked_block_descriptor = fd::get_string_list(jb, "linkedBlockDescriptor", ctx);
            for (std::string& h : *b.linked_block_descriptor) fd::require_hash(h, ctx);
        }
        const json& jd = fd::require(jb, "blockDescriptor", ctx);
        b.descriptor.transactions = fd::get_string_list(jd, "transactions", ctx);
        b.descriptor.status = fd::get_string(jd, "status", ctx);
        if (b.descriptor.status != "main" && b.descriptor.status != "orphan" &&
            b.descriptor.status != "ommer" && b.descriptor.status != "finalized") {
            fd::bad_value(ctx, "status must be main, orphan, ommer or finalized");
        }
        b.descriptor.dag_support = fd::get_bool(jd, "dagSupport", ctx);
        b.descriptor.epoch = fd::get_opt_int(jd, "epoch", ctx);
        b.descriptor.slot = fd::get_opt_int(jd, "slot", ctx);
        if (auto it = jb.find("validationDescriptor"); it != jb.end() && !it->is_null()) {
            ValidationRecord v;
            v.id = fd::get_string(*it, "id", ctx);
            if (v.id.empty()) throw IntegrityError("missing-id", ctx + ": validation id");
            v.hash_value = fd::require_hash(fd::get_string(*it, "hashValue", ctx), ctx);
            v.proposer = fd::get_opt_string(*it, "proposer", ctx);
            v.attestations = fd::get_string_list(*it, "attestations", ctx);
            b.validation = std::move(v);
        }
        fc.blocks.push_back(std::move(b));
    }

    const json& txs = fd::require(doc, "transactions", "transactions");
    if (!txs.is_object()) throw ParseError("transactions must be an object keyed by tx id");
    for (const auto& [txid, jt] : txs.items()) {
        std::string ctx = "transaction " + txid;
        TransactionRecord tx;
        tx.id = fd::require_hash(txid, ctx);
        tx.from = fd::get_opt_string(jt, "from", ctx);
        tx.to = fd::get_opt_string(jt, "to", ctx);
        tx.value = fd::get_opt_amount(jt, "value", ctx);
        const json& jd = fd::require(jt, "transactionDescriptor", ctx);
        tx.data = fd::get_opt_bytes(jd, "data", ctx);
        if (auto it = jd.find("assets"); it != jd.end()) {
            if (!it->is_array()) fd::bad_value(ctx, "assets must be an array");
            for (const json& ja : *it) tx.assets.push_back(fd::parse_asset(ja, ctx));
        }
        if (auto it = jd.find("tokens"); it != jd.end()) {
            if (!it->is_array()) fd::bad_value(ctx, "tokens must be an array");
            for (const json& jt2 : *it) tx.tokens.push_back(fd::parse_token(jt2, ctx));
        }
        tx.utxo_inputs = fd::get_string_list(jd, "utxoInputs", ctx);
        const json& outs = fd::require(jd, "utxoOutputs", ctx);
        if (!outs.is_array()) fd::bad_value(ctx, "utxoOutputs must be an array");
        for (const json& jo : outs) {
            UtxoRecord u;
            u.id = fd::get_string(jo, "id", ctx);
            if (u.id.empty()) throw IntegrityError("missing-id", ctx + ": utxo id");
            u.value = fd::get_amount(jo, "value", ctx);
            u.script = fd::get_bytes(jo, "script", ctx);
            u.spent = fd::get_bool(jo, "spent", ctx);
            tx.utxo_outputs.push_back(std::move(u));
        }
        fc.transactions.emplace(txid, std::move(tx));
    }

    const json& accounts = fd::require(doc, "accounts", "accounts");
    if (!accounts.is_object()) throw ParseError("accounts must be an object keyed by address");
    for (const auto& [addr, ja] : accounts.items()) {
        std::string ctx = "account " + addr;
        if (addr.empty()) throw IntegrityError("missing-id", "account address");
        AccountRecord acc;
        acc.id = addr;
        acc.balance = fd::get_opt_amount(ja, "balance", ctx);
        if (auto it = ja.find("tokens"); it != ja.end()) {
            if (!it->is_array()) fd::bad_value(ctx, "tokens must be an array");
            for (const json& jt2 : *it) acc.tokens.push_back(fd::parse_token(jt2, ctx));
        }
        if (auto it = ja.find("assets"); it != ja.end()) {
            if (!it->is_array()) fd::bad_value(ctx, "assets must be an array");
            for (const json& ja2 : *it) acc.assets.push_back(fd::parse_asset(ja2, ctx));
        }
        if (auto it = ja.find("data"); it != ja.end()) {
            if (!it->is_array()) fd::bad_value(ctx, "data must be an array");
            for (const json& jd2 : *it) acc.data.push_back(fd::parse_data(jd2, ctx));
        }
        fc.accounts.emplace(addr, std::move(acc));
    }

    const json& validators = fd::require(doc, "validators", "validators");
    if (!validators.is_object()) throw ParseError("validators must be an object keyed by id");
    for (const auto& [vid, jv] : validators.items()) {
        std::string ctx = "validator " + vid;
        if (vid.empty()) throw IntegrityError("missing-id", "validator id");
        ValidatorRecord v;
        v.id = vid;
        v.vote = fd::get_string(jv, "vote", ctx);
        v.signature = fd::get_bytes(jv, "signature", ctx);
        fc.validators.emplace(vid, std::move(v));
    }

    fc.reindex();
    return fc;
}

// All chain invariants a fixture must satisfy to be accepted. Throws
// IntegrityError naming the first violated invariant and offending record.
inline void verify_fixture(const FixtureChain& fc) {
    if (fc.blocks.empty()) {
        throw IntegrityError("height-sequence", "fixture has no blocks");
    }
    std::set<std::string> block_ids;
    for (std::size_t i = 0; i < fc.blocks.size(); ++i) {
        const BlockRecord& b = fc.blocks[i];
        if (!block_ids.insert(b.id).second) {
            throw IntegrityError("duplicate-id", "block " + b.id);
        }
        if (b.height != fc.start_height + static_cast<std::int64_t>(i)) {
            throw IntegrityError("height-sequence",
                                 "block " + b.id + " has height " + std::to_string(b.height) +
                                     ", expected " +
                                     std::to_string(fc.start_height + static_cast<std::int64_t>(i)));
        }
    }
    for (std::size_t i = 0; i < fc.blocks.size(); ++i) {
        const BlockRecord& b = fc.blocks[i];
        bool window_genesis = i == 0;
        if (window_genesis && fc.start_height == 0) {
            if (!b.link_descriptor.empty()) {
                throw IntegrityError("link-descriptor",
                                     "genesis block " + b.id + " must have no parent links");
            }
        } else if (!window_genesis) {
            if (b.link_descriptor.empty()) {
                throw IntegrityError("link-descriptor",
                                     "block " + b.id + " has no parent links");
            }
            for (const std::string& parent : b.link_descriptor) {
                auto it = fc.block_by_id.find(parent);
                if (it == fc.block_by_id.end()) {
                    throw IntegrityError("link-descriptor",
                                         "block " + b.id + " links to unknown block " + parent);
                }
                if (it->second >= i) {
                    throw IntegrityError("link-descriptor",
                                         "block " + b.id + " links to a non-earlier block " + parent);
                }
            }
        }
        if (b.linked_block_descriptor && !b.linked_block_descriptor->empty()) {
            if (!b.descriptor.dag_support) {
                throw IntegrityError("dag-link",
                                     "block " + b.id + " has DAG links but dagSupport is false");
            }
            for (const std::string& txref : *b.linked_block_descriptor) {
                auto it = fc.tx_block.find(txref);
                if (it == fc.tx_block.end()) {
                    throw IntegrityError("dag-link",
                                         "block " + b.id + " links to unknown transaction " + txref);
                }
                std::size_t ref_block = fc.block_by_id.at(it->second);
                if (ref_block >= i) {
                    throw IntegrityError(
                        "dag-link", "block " + b.id + " links to a transaction of a non-earlier block");
                }
            }
        }
    }

    // every referenced tx exists; every stored tx is included exactly once
    std::map<std::string, int> inclusion;
    for (const BlockRecord& b : fc.blocks) {
        for (const std::string& txid : b.descriptor.transactions) {
            if (fc.transactions.find(txid) == fc.transactions.end()) {
                throw IntegrityError("transaction-ref",
                                     "block " + b.id + " references unknown transaction " + txid);
            }
            if (++inclusion[txid] > 1) {
                throw IntegrityError("transaction-ref",
                                     "transaction " + txid + " is included in more than one block");
            }
        }
    }
    for (const auto& [txid, tx] : fc.transactions) {
        if (inclusion.find(txid) == inclusion.end()) {
            throw IntegrityError("transaction-ref",
                                 "transaction " + txid + " is not included in any block");
        }
    }

    // UTXO referential and conservation rules, in chain order
    std::set<std::string> utxo_ids;
    for (const auto& [txid, tx] : fc.transactions) {
        for (std::size_t k = 0; k < tx.utxo_outputs.size(); ++k) {
            const UtxoRecord& u = tx.utxo_outputs[k];
            std::string expected = txid + ":" + std::to_string(k);
            if (u.id != expected) {
                throw IntegrityError("utxo-ref", "utxo " + u.id + " should be named " + expected);
            }
            if (!utxo_ids.insert(u.id).second) {
                throw IntegrityError("duplicate-id", "utxo " + u.id);
            }
        }
    }
    std::map<std::string, std::string> consumed_by;
    for (const BlockRecord& b : fc.blocks) {
        for (const std::string& txid : b.descriptor.transactions) {
            const TransactionRecord& tx = fc.transactions.at(txid);
            Amount in_sum = 0;
            for (const std::string& ref : tx.utxo_inputs) {
                auto site = fc.utxo_site.find(ref);
                if (site == fc.utxo_site.end()) {
                    throw IntegrityError("utxo-ref",
                                         "transaction " + txid + " consumes unknown utxo " + ref);
                }
                const BlockRecord* creator = fc.block_of_tx(site->second.first);
                if (creator == nullptr || creator->height > b.height) {
                    throw IntegrityError("utxo-ref",
                                         "transaction " + txid + " consumes utxo " + ref +
                                             " created in a later block");
                }
                auto [pos, fresh] = consumed_by.emplace(ref, txid);
                if (!fresh) {
                    throw IntegrityError("utxo-ref", "utxo " + ref + " is consumed twice");
                }
                const UtxoRecord& u =
                    fc.transactions.at(site->second.first).utxo_outputs[site->second.second];
                if (!u.spent) {
                    throw IntegrityError("utxo-ref",
                                         "utxo " + ref + " is consumed but not marked spent");
                }
                in_sum += u.value;
            }
            if (!tx.utxo_inputs.empty()) {
                Amount out_sum = 0;
                for (const UtxoRecord& u : tx.utxo_outputs) out_sum += u.value;
                if (in_sum < out_sum) {
                    throw IntegrityError("utxo-conservation",
                                         "transaction " + txid + " creates more value than it consumes");
                }
            }
        }
    }

    // attestations must reference known validators
    for (const BlockRecord& b : fc.blocks) {
        if (!b.validation) continue;
        for (const std::string& vid : b.validation->attestations) {
            if (fc.validators.find(vid) == fc.validators.end()) {
                throw IntegrityError("validator-ref",
                                     "block " + b.id + " attestation references unknown validator " + vid);
            }
        }
    }

    // known chains must stay inside their data-model profile
    const ChainProfile* profile = chain_profile(fc.chain.id, fc.chain_descriptor.id);
    if (profile != nullptr) {
        auto forbid = [&](bool populated, const char* class_name) {
            if (populated && !profile->allows(class_name)) {
                throw IntegrityError("profile", fc.chain.id + " fixtures must not populate " +
                                                    class_name);
            }
        };
        forbid(!fc.accounts.empty(), "Account");
        forbid(!fc.validators.empty(), "ValidatorDescriptor");
        bool any_utxo = false, any_token = false, any_asset = false, any_data = false;
        for (const auto& [txid, tx] : fc.transactions) {
            any_utxo = any_utxo || !tx.utxo_inputs.empty() || !tx.utxo_outputs.empty();
            any_token = any_token || !tx.tokens.empty();
            any_asset = any_asset || !tx.assets.empty();
        }
        for (const auto& [addr, acc] : fc.accounts) {
            any_token = any_token || !acc.tokens.empty();
            any_asset = any_asset || !acc.assets.empty();
            any_data = any_data || !acc.data.empty();
        }
        forbid(any_utxo, "UTXO");
        forbid(any_token, "Token");
        forbid(any_asset, "Asset");
        forbid(any_data, "Data");
    }
}

inline nlohmann::json fixture_to_json(const FixtureChain& fc) {
    using nlohmann::json;
    namespace fd = fixture_detail;
    json doc;
    doc["chain"] = json{{"id", fc.chain.id}, {"name", fc.chain.name}};
    doc["network"] = json{{"id", fc.network.id},
                          {"name", fc.network.name},
                          {"isTest", fc.network.is_test}};
    doc["chainDescriptor"] = json{{"id", fc.chain_descriptor.id},
                                  {"dataStructure", fc.chain_descriptor.data_structure},
                                  {"consensus", fc.chain_descriptor.consensus}};
    if (fc.start_height != 0) doc["startHeight"] = fc.start_height;
    doc["blocks"] = json::array();
    for (const BlockRecord& b : fc.blocks) {
        json jb;
        jb["id"] = b.id;
        jb["height"] = b.height;
        jb["timestamp"] = b.timestamp;
        jb["linkDescriptor"] = b.link_descriptor;
        jb["linkedBlockDescriptor"] =
            b.linked_block_descriptor ? json(*b.linked_block_descriptor) : json(nullptr);
        json jd;
        jd["transactions"] = b.descriptor.transactions;
        jd["status"] = b.descriptor.status;
        jd["dagSupport"] = b.descriptor.dag_support;
        jd["epoch"] = b.descriptor.epoch ? json(*b.descriptor.epoch) : json(nullptr);
        jd["slot"] = b.descriptor.slot ? json(*b.descriptor.slot) : json(nullptr);
        jb["blockDescriptor"] = std::move(jd);
        if (b.validation) {
            json jv;
            jv["id"] = b.validation->id;
            jv["hashValue"] = b.validation->hash_value;
            jv["proposer"] = b.validation->proposer ? json(*b.validation->proposer) : json(nullptr);
            jv["attestations"] = b.validation->attestations;
            jb["validationDescriptor"] = std::move(jv);
        }
        doc["blocks"].push_back(std::move(jb));
    }
    doc["transactions"] = json::object();
    for (const auto& [txid, tx] : fc.transactions) {
        json jt;
        jt["from"] = tx.from ? json(*tx.from) : json(nullptr);
        jt["to"] = tx.to ? json(*tx.to) : json(nullptr);
        jt["value"] = tx.value ? json(tx.value->str()) : json(nullptr);
        json jd;
        jd["data"] = tx.data ? json(hex_from_bytes(*tx.data)) : json(nullptr);
        jd["assets"] = json::array();
        for (const AssetRecord& a : tx.assets) jd["assets"].push_back(fd::dump_asset(a));
        jd["tokens"] = json::array();
        for (const TokenRecord& t : tx.tokens) jd["tokens"].push_back(fd::dump_token(t));
        jd["utxoInputs"] = tx.utxo_inputs;
        jd["utxoOutputs"] = json::array();
        for (const UtxoRecord& u : tx.utxo_outputs) {
            jd["utxoOutputs"].push_back(json{{"id", u.id},
                                             {"value", u.value.str()},
                                             {"script", hex_from_bytes(u.script)},
                                             {"spent", u.spent}});
        }
        jt["transactionDescriptor"] = std::move(jd);
        doc["transactions"][txid] = std::move(jt);
    }
    doc["accounts"] = nlohmann::json::object();
    for (const auto& [addr, acc] : fc.accounts) {
        json ja;
        ja["balance"] = acc.balance ? json(acc.balance->str()) : json(nullptr);
        ja["tokens"] = json::array();
        for (const TokenRecord& t : acc.tokens) ja["tokens"].push_back(fd::dump_token(t));
        ja["assets"] = json::array();
        for (const AssetRecord& a : acc.assets) ja["assets"].push_back(fd::dump_asset(a));
        ja["data"] = json::array();
        for (const DataRecord& d : acc.data) ja["data"].push_back(fd::dump_data(d));
        doc["accounts"][addr] = std::move(ja);
    }
    doc["validators"] = nlohmann::json::object();
    for (const auto& [vid, v] : fc.validators) {
        doc["validators"][vid] =
            json{{"vote", v.vote}, {"signature", hex_from_bytes(v.signature)}};
    }
    return doc;
}

inline std::string fixture_to_text(const FixtureChain& fc) {
    return fixture_to_json(fc).dump(2) + "\n";
}

inline FixtureChain load_fixture_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid fixture JSON: ") + e.what());
    }
    FixtureChain fc = fixture_from_json(doc);
    verify_fixture(fc);
    return fc;
}

// Loads and fully verifies a fixture file; violations are fatal.
inline FixtureChain load_fixture(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open fixture file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_fixture_text(buf.str());
}

inline void write_fixture(const FixtureChain& fc, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot write fixture file: " + path.string());
    out << fixture_to_text(fc);
}

}  // namespace ccql
