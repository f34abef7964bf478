#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ccql/ast.hpp"
#include "ccql/errors.hpp"
#include "ccql/fixture.hpp"
#include "ccql/schema.hpp"

namespace ccql {

struct ChainInfo {
    Instance chain;
    Instance network;
    Instance chain_descriptor;
};

struct BlockBundle {
    Instance block;
    Instance descriptor;
    std::optional<Instance> validation;
    std::vector<Instance> validators;  // attestation order
};

struct TransactionBundle {
    Instance tx;
    Instance descriptor;
    std::vector<Instance> utxos;   // consumed inputs first, then created outputs
    std::vector<Instance> assets;
    std::vector<Instance> tokens;
    std::vector<Instance> data;
    std::string block_id;          // containing block, empty if unknown
};

struct AccountBundle {
    Instance account;
    std::vector<Instance> tokens;
    std::vector<Instance> assets;
    std::vector<Instance> data;
};

// Uniform read-only access to one chain behind one source. Adapters are
// immutable after connection; concurrent calls must be safe.
class Adapter {
public:
    virtual ~Adapter() = default;

    virtual ChainInfo chain_info() const = 0;
    virtual BlockBundle block(const EntityAnchor& anchor) const = 0;
    virtual TransactionBundle transaction(const EntityAnchor& anchor) const = 0;
    virtual AccountBundle account(const EntityAnchor& anchor) const = 0;

    // enumeration, used when a source has no entity anchor
    virtual std::vector<std::string> block_ids() const = 0;  // on-chain order
    virtual std::vector<std::string> transaction_ids(const std::string& block_id) const = 0;
    virtual std::vector<std::string> account_ids() const = 0;  // address order

    virtual std::string chain_id() const = 0;
    virtual std::string chain_descriptor_id() const = 0;
};

namespace instance_detail {

inline Value opt_string(const std::optional<std::string>& s) {
    return s ? Value(*s) : Value();
}
inline Value opt_amount(const std::optional<Amount>& a) {
    return a ? Value(*a) : Value();
}
inline Value opt_int(const std::optional<std::int64_t>& i) {
    return i ? Value(*i) : Value();
}
inline Value opt_bytes(const std::optional<Bytes>& b) {
    return b ? Value(*b) : Value();
}

inline Instance make(std::string class_name, std::map<std::string, Value> attrs) {
    Instance inst;
    inst.class_name = std::move(class_name);
    inst.attributes = std::move(attrs);
    return inst;
}

inline Instance token_instance(const TokenRecord& t) {
    return make("Token", {{"id", Value(t.id)},
                          {"standard", Value(t.standard)},
                          {"name", Value(t.name)},
                          {"symbol", Value(t.symbol)},
                          {"decimals", Value(t.decimals)},
                          {"balance", opt_amount(t.balance)}});
}

inline Instance asset_instance(const AssetRecord& a) {
    return make("Asset", {{"id", Value(a.id)},
                          {"name", Value(a.name)},
                          {"amount", Value(a.amount)}});
}

inline Instance data_instance(const DataRecord& d) {
    return make("Data", {{"id", Value(d.id)},
                         {"kind", Value(d.kind)},
                         {"payload", Value(d.payload)}});
}

inline Instance utxo_instance(const UtxoRecord& u) {
    return make("UTXO", {{"id", Value(u.id)},
                         {"value", Value(u.value)},
                         {"script", Value(u.script)},
                         {"spent", Value(u.spent)}});
}

inline Instance validator_instance(const ValidatorRecord& v) {
    return make("ValidatorDescriptor", {{"id", Value(v.id)},
                                        {"vote", Value(v.vote)},
                                        {"signature", Value(v.signature)}});
}

}  // namespace instance_detail

// Adapter over an in-memory fixture snapshot.
class FixtureAdapter : public Adapter {
public:
    explicit FixtureAdapter(std::shared_ptr<const FixtureChain> chain)
        : chain_(std::move(chain)) {}

    ChainInfo chain_info() const override {
        namespace d = instance_detail;
        const FixtureChain& fc = *chain_;
        ChainInfo info;
        info.chain = d::make("Chain", {{"id", Value(fc.chain.id)},
                                       {"name", Value(fc.chain.name)}});
        info.network = d::make("Network", {{"id", Value(fc.network.id)},
                                           {"name", Value(fc.network.name)},
                                           {"isTest", Value(fc.network.is_test)}});
        info.chain_descriptor =
            d::make("ChainDescriptor",
                    {{"id", Value(fc.chain_descriptor.id)},
                     {"dataStructure", Value(fc.chain_descriptor.data_structure)},
                     {"consensus", Value(fc.chain_descriptor.consensus)}});
        return info;
    }

    BlockBundle block(const EntityAnchor& anchor) const override {
        const BlockRecord* rec = find_block(anchor.identifier);
        if (rec == nullptr) throw NotFound("block " + anchor.identifier);
        return block_bundle(*rec);
    }

    TransactionBundle transaction(const EntityAnchor& anchor) const override {
        auto it = chain_->transactions.find(anchor.identifier);
        if (it == chain_->transactions.end()) {
            throw NotFound("transaction " + anchor.identifier);
        }
        return tx_bundle(it->second);
    }

    AccountBundle account(const EntityAnchor& anchor) const override {
        namespace d = instance_detail;
        const ChainProfile* profile =
            chain_profile(chain_->chain.id, chain_->chain_descriptor.id);
        if (profile != nullptr && !profile->supports_accounts()) {
            throw UnsupportedByChain("accounts on chain " + chain_->chain.id);
        }
        auto it = chain_->accounts.find(anchor.identifier);
        if (it == chain_->accounts.end()) {
            // account-model chains expose every address; untouched ones hold zero
            AccountBundle fresh;
            fresh.account = d::make("Account", {{"id", Value(anchor.identifier)},
                                                {"balance", Value(Amount(0))}});
            return fresh;
        }
        const AccountRecord& rec = it->second;
        AccountBundle bundle;
        bundle.account = d::make("Account", {{"id", Value(rec.id)},
                                             {"balance", d::opt_amount(rec.balance)}});
        for (const TokenRecord& t : rec.tokens) bundle.tokens.push_back(d::token_instance(t));
        for (const AssetRecord& a : rec.assets) bundle.assets.push_back(d::asset_instance(a));
        for (const DataRecord& d2 : rec.data) bundle.data.push_back(d::data_instance(d2));
        return bundle;
    }

    std::vector<std::string> block_ids() const override {
        std::vector<std::string> ids;
        ids.reserve(chain_->blocks.size());
        for (const BlockRecord& b : chain_->blocks) ids.push_back(b.id);
        return ids;
    }

    std::vector<std::string> transaction_ids(const std::string& block_id) const override {
        auto it = chain_->block_by_id.find(block_id);
        if (it == chain_->block_by_id.end()) throw NotFound("block " + block_id);
        return chain_->blocks[it->second].descriptor.transactions;
    }

    std::vector<std::string> account_ids() const override {
        std::vector<std::string> ids;
        ids.reserve(chain_->accounts.size());
        for (const auto& [addr, acc] : chain_->accounts) ids.push_back(addr);
        return ids;
    }

    std::string chain_id() const override { return chain_->chain.id; }
    std::string chain_descriptor_id() const override { return chain_->chain_descriptor.id; }

    const FixtureChain& fixture() const { return *chain_; }

private:
    const BlockRecord* find_block(const std::string& identifier) const {
        bool all_digits = !identifier.empty();
        for (char c : identifier) {
            if (c < '0' || c > '9') all_digits = false;
        }
        if (all_digits) {
            std::int64_t height = 0;
            try {
                height = std::stoll(identifier);
            } catch (const std::exception&) {
                return nullptr;
            }
            auto it = chain_->block_by_height.find(height);
            return it == chain_->block_by_height.end() ? nullptr : &chain_->blocks[it->second];
        }
        auto it = chain_->block_by_id.find(identifier);
        return it == chain_->block_by_id.end() ? nullptr : &chain_->blocks[it->second];
    }

    BlockBundle block_bundle(const BlockRecord& rec) const {
        namespace d = instance_detail;
        BlockBundle bundle;
        bundle.block = d::make(
            "Block",
            {{"id", Value(rec.id)},
             {"height", Value(rec.height)},
             {"timestamp", Value(rec.timestamp)},
             {"linkDescriptor", Value(StringList(rec.link_descriptor))},
             {"linkedBlockDescriptor", rec.linked_block_descriptor
                                           ? Value(StringList(*rec.linked_block_descriptor))
                                           : Value()}});
        bundle.descriptor = d::make(
            "BlockDescriptor",
            {{"id", Value(rec.id)},
             {"transactions", Value(StringList(rec.descriptor.transactions))},
             {"status", Value(rec.descriptor.status)},
             {"dagSupport", Value(rec.descriptor.dag_support)},
             {"epoch", d::opt_int(rec.descriptor.epoch)},
             {"slot", d::opt_int(rec.descriptor.slot)}});
        if (rec.validation) {
            bundle.validation = d::make(
                "ValidationDescriptor",
                {{"id", Value(rec.validation->id)},
                 {"hashValue", Value(rec.validation->hash_value)},
                 {"proposer", d::opt_string(rec.validation->proposer)},
                 {"attestations", Value(StringList(rec.validation->attestations))}});
            for (const std::string& vid : rec.validation->attestations) {
                auto it = chain_->validators.find(vid);
                if (it != chain_->validators.end()) {
                    bundle.validators.push_back(d::validator_instance(it->second));
                }
            }
        }
        return bundle;
    }

    TransactionBundle tx_bundle(const TransactionRecord& rec) const {
        namespace d = instance_detail;
        TransactionBundle bundle;
        bundle.tx = d::make("Transaction", {{"id", Value(rec.id)},
                                            {"from", d::opt_string(rec.from)},
                                            {"to", d::opt_string(rec.to)},
                                            {"value", d::opt_amount(rec.value)}});
        StringList asset_ids, token_ids, out_ids;
        for (const AssetRecord& a : rec.assets) asset_ids.push_back(a.id);
        for (const TokenRecord& t : rec.tokens) token_ids.push_back(t.id);
        for (const UtxoRecord& u : rec.utxo_outputs) out_ids.push_back(u.id);
        bundle.descriptor =
            d::make("TransactionDescriptor",
                    {{"id", Value(rec.id)},
                     {"data", d::opt_bytes(rec.data)},
                     {"assets", Value(asset_ids)},
                     {"tokens", Value(token_ids)},
                     {"utxoInputs", Value(StringList(rec.utxo_inputs))},
                     {"utxoOutputs", Value(out_ids)}});
        for (const std::string& ref : rec.utxo_inputs) {
            auto site = chain_->utxo_site.find(ref);
            if (site != chain_->utxo_site.end()) {
                const UtxoRecord& u =
                    chain_->transactions.at(site->second.first).utxo_outputs[site->second.second];
                bundle.utxos.push_back(d::utxo_instance(u));
            }
        }
        for (const UtxoRecord& u : rec.utxo_outputs) {
            bundle.utxos.push_back(d::utxo_instance(u));
        }
        for (const AssetRecord& a : rec.assets) bundle.assets.push_back(d::asset_instance(a));
        for (const TokenRecord& t : rec.tokens) bundle.tokens.push_back(d::token_instance(t));
        auto blk = chain_->tx_block.find(rec.id);
        if (blk != chain_->tx_block.end()) bundle.block_id = blk->second;
        return bundle;
    }

    std::shared_ptr<const FixtureChain> chain_;
};

struct SourceConfigEntry {
    std::string chain;
    std::string network;
    std::string chain_descriptor;
    std::string backend;   // fixture | rpc
    std::string location;  // fixture path or rpc endpoint URL

    std::string triple() const { return chain + ":" + network + ":" + chain_descriptor; }
};

// Factory for rpc-backed adapters; injected so the registry stays transport
// agnostic (see rpc.hpp for the live implementation).
using RpcAdapterFactory = std::function<std::shared_ptr<Adapter>(const SourceConfigEntry&)>;

// The source-config registry: resolves (chain, network, chainDescriptor)
// triples to connected adapters. Fixture files are loaded lazily and cached
// per path.
class SourceRegistry {
public:
    SourceRegistry() = default;

    static SourceRegistry from_file(const std::filesystem::path& path,
                                    RpcAdapterFactory rpc_factory = {}) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ParseError("cannot open source config: " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(buf.str());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("invalid source config JSON: ") + e.what());
        }
        return from_json(doc, path.parent_path(), std::move(rpc_factory));
    }

    static SourceRegistry from_json(const nlohmann::json& doc,
                                    const std::filesystem::path& base_dir,
                                    RpcAdapterFactory rpc_factory = {}) {
        if (!doc.is_array()) throw ParseError("source config must be a JSON array");
        SourceRegistry reg;
        reg.rpc_factory_ = std::move(rpc_factory);
        for (const auto& je : doc) {
            SourceConfigEntry entry;
            entry.chain = je.value("chain", "");
            entry.network = je.value("network", "");
            entry.chain_descriptor = je.value("chainDescriptor", "");
            entry.backend = je.value("backend", "fixture");
            entry.location = je.value("path", je.value("endpoint", ""));
            if (entry.chain.empty() || entry.network.empty() ||
                entry.chain_descriptor.empty() || entry.location.empty()) {
                throw ParseError("source config entry needs chain, network, chainDescriptor "
                                 "and path or endpoint");
            }
            if (entry.backend != "fixture" && entry.backend != "rpc") {
                throw ParseError("source config backend must be fixture or rpc");
            }
            if (entry.backend == "fixture") {
                std::filesystem::path p(entry.location);
                if (p.is_relative()) entry.location = (base_dir / p).string();
            }
            std::string key = entry.triple();
            if (!reg.entries_.emplace(key, entry).second) {
                throw ParseError("duplicate source config entry: " + key);
            }
            reg.order_.push_back(key);
        }
        return reg;
    }

    void add_fixture(std::shared_ptr<const FixtureChain> chain) {
        SourceConfigEntry entry;
        entry.chain = chain->chain.id;
        entry.network = chain->network.id;
        entry.chain_descriptor = chain->chain_descriptor.id;
        entry.backend = "fixture";
        entry.location = "<memory>";
        std::string key = entry.triple();
        entries_[key] = entry;
        order_.push_back(key);
        adapters_[key] = std::make_shared<FixtureAdapter>(std::move(chain));
    }

    std::shared_ptr<Adapter> bind(const SourceSpec& spec) const {
        std::string key = spec.triple();
        auto cached = adapters_.find(key);
        if (cached != adapters_.end()) return cached->second;
        auto it = entries_.find(key);
        if (it == entries_.end()) throw UnknownSource(key);
        const SourceConfigEntry& entry = it->second;
        std::shared_ptr<Adapter> adapter;
        if (entry.backend == "fixture") {
            std::shared_ptr<const FixtureChain> chain;
            try {
                chain = std::make_shared<const FixtureChain>(load_fixture(entry.location));
            } catch (const Error& e) {
                throw AdapterUnavailable("fixture for " + key + ": " + e.what());
            }
            adapter = std::make_shared<FixtureAdapter>(std::move(chain));
        } else {
            if (!rpc_factory_) {
                throw AdapterUnavailable("no rpc transport configured for " + key);
            }
            adapter = rpc_factory_(entry);
        }
        adapters_.emplace(key, adapter);
        return adapter;
    }

    std::vector<SourceConfigEntry> entries() const {
        std::vector<SourceConfigEntry> out;
        for (const std::string& key : order_) out.push_back(entries_.at(key));
        return out;
    }

private:
    std::map<std::string, SourceConfigEntry> entries_;
    std::vector<std::string> order_;
    mutable std::map<std::string, std::shared_ptr<Adapter>> adapters_;
    RpcAdapterFactory rpc_factory_;
};

}  // namespace ccql
