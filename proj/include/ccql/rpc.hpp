#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ccql/adapter.hpp"
#include "ccql/errors.hpp"
#include "ccql/value.hpp"

namespace ccql {

// Node access for live-backed sources. The translation of wire documents
// into data-model instances lives in free functions so it can be exercised
// against recorded responses without a node; docs/wire-mappings.md tabulates
// the field-by-field mapping.

class RpcTransport {
public:
    virtual ~RpcTransport() = default;
    virtual nlohmann::json call(const std::string& method, const nlohmann::json& params) = 0;
};

// Replays canned responses from a recording document:
//   {"calls": [{"method": "...", "params": [...], "result": ...}, ...]}
class ReplayTransport : public RpcTransport {
public:
    explicit ReplayTransport(const nlohmann::json& recording) {
        if (!recording.is_object() || !recording.contains("calls")) {
            throw ParseError("recording must be an object with a calls array");
        }
        for (const auto& call : recording.at("calls")) {
            std::string key = call.at("method").get<std::string>() + " " +
                              call.at("params").dump();
            responses_[key] = call.at("result");
        }
    }

    static ReplayTransport from_file(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ParseError("cannot open recording: " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        try {
            return ReplayTransport(nlohmann::json::parse(buf.str()));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("invalid recording JSON: ") + e.what());
        }
    }

    nlohmann::json call(const std::string& method, const nlohmann::json& params) override {
        auto it = responses_.find(method + " " + params.dump());
        if (it == responses_.end()) {
            throw AdapterUnavailable("no recorded response for " + method + " " + params.dump());
        }
        return it->second;
    }

private:
    std::map<std::string, nlohmann::json> responses_;
};

namespace rpc_detail {

inline std::int64_t hex_quantity(const nlohmann::json& j, const char* what) {
    if (!j.is_string()) throw AdapterUnavailable(std::string(what) + ": expected hex quantity");
    const std::string s = j.get<std::string>();
    try {
        return std::stoll(s, nullptr, 16);
    } catch (const std::exception&) {
        throw AdapterUnavailable(std::string(what) + ": bad hex quantity " + s);
    }
}

inline Amount hex_amount(const nlohmann::json& j, const char* what) {
    if (!j.is_string()) throw AdapterUnavailable(std::string(what) + ": expected hex amount");
    try {
        return Amount(j.get<std::string>());  // cpp_int accepts 0x-prefixed strings
    } catch (const std::exception&) {
        throw AdapterUnavailable(std::string(what) + ": bad hex amount");
    }
}

inline std::string lower_string(const nlohmann::json& j, const char* what) {
    if (!j.is_string()) throw AdapterUnavailable(std::string(what) + ": expected string");
    return to_lower(j.get<std::string>());
}

// Bitcoin wire amounts are BTC decimals; satoshi totals stay below 2^53 so
// the round trip through double is exact after rounding.
inline Amount btc_to_satoshi(const nlohmann::json& j) {
    return Amount(static_cast<std::int64_t>(std::llround(j.get<double>() * 1e8)));
}

inline ChainInfo chain_info_from_entry(const SourceConfigEntry& entry,
                                       const std::string& chain_name,
                                       const std::string& data_structure,
                                       const std::string& consensus) {
    namespace d = instance_detail;
    ChainInfo info;
    info.chain = d::make("Chain", {{"id", Value(entry.chain)}, {"name", Value(chain_name)}});
    info.network = d::make("Network", {{"id", Value(entry.network)},
                                       {"name", Value(entry.network)},
                                       {"isTest", Value(entry.network != "main")}});
    info.chain_descriptor = d::make("ChainDescriptor",
                                    {{"id", Value(entry.chain_descriptor)},
                                     {"dataStructure", Value(data_structure)},
                                     {"consensus", Value(consensus)}});
    return info;
}

}  // namespace rpc_detail

// --- Ethereum node protocol ------------------------------------------------

inline BlockBundle eth_block_bundle(const nlohmann::json& result) {
    namespace d = instance_detail;
    namespace rd = rpc_detail;
    BlockBundle bundle;
    std::string hash = rd::lower_string(result.at("hash"), "block.hash");
    std::int64_t number = rd::hex_quantity(result.at("number"), "block.number");
    StringList parents;
    if (number > 0) {
        parents.push_back(rd::lower_string(result.at("parentHash"), "block.parentHash"));
    }
    StringList txs;
    for (const auto& t : result.at("transactions")) {
        txs.push_back(rd::lower_string(t, "block.transactions"));
    }
    bundle.block = d::make("Block",
                           {{"id", Value(hash)},
                            {"height", Value(number)},
                            {"timestamp", Value(rd::hex_quantity(result.at("timestamp"),
                                                                 "block.timestamp"))},
                            {"linkDescriptor", Value(parents)},
                            {"linkedBlockDescriptor", Value()}});
    bundle.descriptor = d::make("BlockDescriptor", {{"id", Value(hash)},
                                                    {"transactions", Value(txs)},
                                                    {"status", Value(std::string("main"))},
                                                    {"dagSupport", Value(false)},
                                                    {"epoch", Value()},
                                                    {"slot", Value()}});
    Value proposer;
    if (result.contains("miner") && result.at("miner").is_string()) {
        proposer = Value(rd::lower_string(result.at("miner"), "block.miner"));
    }
    bundle.validation = d::make("ValidationDescriptor",
                                {{"id", Value(hash + "/v")},
                                 {"hashValue", Value(hash)},
                                 {"proposer", proposer},
                                 {"attestations", Value(StringList{})}});
    return bundle;
}

inline TransactionBundle eth_transaction_bundle(const nlohmann::json& result) {
    namespace d = instance_detail;
    namespace rd = rpc_detail;
    TransactionBundle bundle;
    std::string hash = rd::lower_string(result.at("hash"), "tx.hash");
    Value to;
    if (result.contains("to") && result.at("to").is_string()) {
        to = Value(rd::lower_string(result.at("to"), "tx.to"));
    }
    bundle.tx = d::make("Transaction",
                        {{"id", Value(hash)},
                         {"from", Value(rd::lower_string(result.at("from"), "tx.from"))},
                         {"to", to},
                         {"value", Value(rd::hex_amount(result.at("value"), "tx.value"))}});
    Value data;
    if (result.contains("input") && result.at("input").is_string()) {
        std::string input = rd::lower_string(result.at("input"), "tx.input");
        if (input.size() > 2) data = Value(bytes_from_hex(input));
    }
    bundle.descriptor = d::make("TransactionDescriptor",
                                {{"id", Value(hash)},
                                 {"data", data},
                                 {"assets", Value(StringList{})},
                                 {"tokens", Value(StringList{})},
                                 {"utxoInputs", Value(StringList{})},
                                 {"utxoOutputs", Value(StringList{})}});
    if (result.contains("blockHash") && result.at("blockHash").is_string()) {
        bundle.block_id = rd::lower_string(result.at("blockHash"), "tx.blockHash");
    }
    return bundle;
}

inline AccountBundle eth_account_bundle(const std::string& address,
                                        const nlohmann::json& balance_result) {
    namespace d = instance_detail;
    namespace rd = rpc_detail;
    AccountBundle bundle;
    bundle.account =
        d::make("Account", {{"id", Value(to_lower(address))},
                            {"balance", Value(rd::hex_amount(balance_result, "balance"))}});
    return bundle;
}

// --- Bitcoin node protocol -------------------------------------------------

inline BlockBundle btc_block_bundle(const nlohmann::json& result) {
    namespace d = instance_detail;
    namespace rd = rpc_detail;
    BlockBundle bundle;
    std::string hash = rd::lower_string(result.at("hash"), "block.hash");
    if (!is_hex_hash("0x" + hash)) throw AdapterUnavailable("block.hash: not hex");
    hash = "0x" + hash;
    std::int64_t height = result.at("height").get<std::int64_t>();
    StringList parents;
    if (result.contains("previousblockhash")) {
        parents.push_back(
            "0x" + rd::lower_string(result.at("previousblockhash"), "block.previousblockhash"));
    }
    StringList txs;
    for (const auto& t : result.at("tx")) {
        // verbosity 2 returns objects, verbosity 1 plain ids
        if (t.is_object()) {
            txs.push_back("0x" + rd::lower_string(t.at("txid"), "block.tx"));
        } else {
            txs.push_back("0x" + rd::lower_string(t, "block.tx"));
        }
    }
    bool orphan = result.contains("confirmations") &&
                  result.at("confirmations").is_number() &&
                  result.at("confirmations").get<double>() < 0;
    bundle.block = d::make("Block", {{"id", Value(hash)},
                                     {"height", Value(height)},
                                     {"timestamp", Value(result.at("time").get<std::int64_t>())},
                                     {"linkDescriptor", Value(parents)},
                                     {"linkedBlockDescriptor", Value()}});
    bundle.descriptor =
        d::make("BlockDescriptor", {{"id", Value(hash)},
                                    {"transactions", Value(txs)},
                                    {"status", Value(std::string(orphan ? "orphan" : "main"))},
                                    {"dagSupport", Value(false)},
                                    {"epoch", Value()},
                                    {"slot", Value()}});
    bundle.validation = d::make("ValidationDescriptor", {{"id", Value(hash + "/v")},
                                                         {"hashValue", Value(hash)},
                                                         {"proposer", Value()},
                                                         {"attestations", Value(StringList{})}});
    return bundle;
}

// Resolves a raw transaction document by unprefixed txid, for decoding the
// outputs a transaction consumes; may return null when unavailable.
using BtcTxResolver = std::function<nlohmann::json(const std::string&)>;

inline TransactionBundle btc_transaction_bundle(const nlohmann::json& result,
                                                const BtcTxResolver& resolve_input_tx = {}) {
    namespace d = instance_detail;
    namespace rd = rpc_detail;
    TransactionBundle bundle;
    std::string txid = "0x" + rd::lower_string(result.at("txid"), "tx.txid");
    StringList inputs;
    std::vector<Instance> input_utxos;
    for (const auto& vin : result.at("vin")) {
        if (vin.contains("coinbase")) continue;
        std::string creator = rd::lower_string(vin.at("txid"), "vin.txid");
        std::int64_t n = vin.at("vout").get<std::int64_t>();
        inputs.push_back("0x" + creator + ":" + std::to_string(n));
        if (resolve_input_tx) {
            nlohmann::json creator_doc = resolve_input_tx(creator);
            if (!creator_doc.is_null()) {
                const auto& vout = creator_doc.at("vout").at(static_cast<std::size_t>(n));
                Bytes script;
                if (vout.contains("scriptPubKey") && vout.at("scriptPubKey").contains("hex")) {
                    script = bytes_from_hex(
                        "0x" + rd::lower_string(vout.at("scriptPubKey").at("hex"), "vout.script"));
                }
                input_utxos.push_back(
                    d::make("UTXO", {{"id", Value(inputs.back())},
                                     {"value", Value(rd::btc_to_satoshi(vout.at("value")))},
                                     {"script", Value(script)},
                                     {"spent", Value(true)}}));
            }
        }
    }
    StringList outputs;
    std::vector<Instance> utxos = std::move(input_utxos);
    for (const auto& vout : result.at("vout")) {
        std::string id = txid + ":" + std::to_string(vout.at("n").get<std::int64_t>());
        outputs.push_back(id);
        Bytes script;
        if (vout.contains("scriptPubKey") && vout.at("scriptPubKey").contains("hex")) {
            script = bytes_from_hex(
                "0x" + rd::lower_string(vout.at("scriptPubKey").at("hex"), "vout.script"));
        }
        // spent status is not part of this call; gettxout would refine it
        utxos.push_back(d::make("UTXO", {{"id", Value(id)},
                                         {"value", Value(rd::btc_to_satoshi(vout.at("value")))},
                                         {"script", Value(script)},
                                         {"spent", Value(false)}}));
    }
    bundle.tx = d::make("Transaction", {{"id", Value(txid)},
                                        {"from", Value()},
                                        {"to", Value()},
                                        {"value", Value()}});
    bundle.descriptor = d::make("TransactionDescriptor",
                                {{"id", Value(txid)},
                                 {"data", Value()},
                                 {"assets", Value(StringList{})},
                                 {"tokens", Value(StringList{})},
                                 {"utxoInputs", Value(inputs)},
                                 {"utxoOutputs", Value(outputs)}});
    bundle.utxos = std::move(utxos);
    if (result.contains("blockhash") && result.at("blockhash").is_string()) {
        bundle.block_id = "0x" + rd::lower_string(result.at("blockhash"), "tx.blockhash");
    }
    return bundle;
}

// --- Adapters over a transport ----------------------------------------------

class EthRpcAdapter : public Adapter {
public:
    EthRpcAdapter(std::shared_ptr<RpcTransport> transport, SourceConfigEntry entry)
        : transport_(std::move(transport)), entry_(std::move(entry)) {}

    ChainInfo chain_info() const override {
        return rpc_detail::chain_info_from_entry(entry_, "Ethereum", "blocks", "ethash-pow");
    }

    BlockBundle block(const EntityAnchor& anchor) const override {
        nlohmann::json result;
        if (is_hex_hash(anchor.identifier)) {
            result = transport_->call("eth_getBlockByHash",
                                      nlohmann::json::array({anchor.identifier, false}));
        } else {
            std::int64_t height = std::stoll(anchor.identifier);
            std::ostringstream hex;
            hex << "0x" << std::hex << height;
            result = transport_->call("eth_getBlockByNumber",
                                      nlohmann::json::array({hex.str(), false}));
        }
        if (result.is_null()) throw NotFound("block " + anchor.identifier);
        return eth_block_bundle(result);
    }

    TransactionBundle transaction(const EntityAnchor& anchor) const override {
        nlohmann::json result = transport_->call("eth_getTransactionByHash",
                                                 nlohmann::json::array({anchor.identifier}));
        if (result.is_null()) throw NotFound("transaction " + anchor.identifier);
        return eth_transaction_bundle(result);
    }

    AccountBundle account(const EntityAnchor& anchor) const override {
        nlohmann::json result = transport_->call(
            "eth_getBalance", nlohmann::json::array({anchor.identifier, "latest"}));
        if (result.is_null()) throw NotFound("account " + anchor.identifier);
        return eth_account_bundle(anchor.identifier, result);
    }

    std::vector<std::string> block_ids() const override {
        throw AdapterUnavailable("block enumeration requires a fixture backend");
    }

    std::vector<std::string> transaction_ids(const std::string& block_id) const override {
        nlohmann::json result =
            transport_->call("eth_getBlockByHash", nlohmann::json::array({block_id, false}));
        if (result.is_null()) throw NotFound("block " + block_id);
        std::vector<std::string> out;
        for (const auto& t : result.at("transactions")) out.push_back(t.get<std::string>());
        return out;
    }

    std::vector<std::string> account_ids() const override {
        throw AdapterUnavailable("account enumeration requires a fixture backend");
    }

    std::string chain_id() const override { return entry_.chain; }
    std::string chain_descriptor_id() const override { return entry_.chain_descriptor; }

private:
    std::shared_ptr<RpcTransport> transport_;
    SourceConfigEntry entry_;
};

class BtcRpcAdapter : public Adapter {
public:
    BtcRpcAdapter(std::shared_ptr<RpcTransport> transport, SourceConfigEntry entry)
        : transport_(std::move(transport)), entry_(std::move(entry)) {}

    ChainInfo chain_info() const override {
        return rpc_detail::chain_info_from_entry(entry_, "Bitcoin", "blocks", "nakamoto-pow");
    }

    BlockBundle block(const EntityAnchor& anchor) const override {
        std::string hash = anchor.identifier;
        bool all_digits = !hash.empty();
        for (char c : hash) {
            if (c < '0' || c > '9') all_digits = false;
        }
        if (all_digits) {
            nlohmann::json hash_result =
                transport_->call("getblockhash", nlohmann::json::array({std::stoll(hash)}));
            if (hash_result.is_null()) throw NotFound("block " + anchor.identifier);
            hash = hash_result.get<std::string>();
        } else if (is_hex_hash(hash)) {
            hash = hash.substr(2);  // node expects unprefixed hashes
        }
        nlohmann::json result = transport_->call("getblock", nlohmann::json::array({hash, 2}));
        if (result.is_null()) throw NotFound("block " + anchor.identifier);
        return btc_block_bundle(result);
    }

    TransactionBundle transaction(const EntityAnchor& anchor) const override {
        std::string txid = anchor.identifier;
        if (is_hex_hash(txid)) txid = txid.substr(2);
        nlohmann::json result =
            transport_->call("getrawtransaction", nlohmann::json::array({txid, true}));
        if (result.is_null()) throw NotFound("transaction " + anchor.identifier);
        return btc_transaction_bundle(result, [this](const std::string& creator) {
            return transport_->call("getrawtransaction",
                                    nlohmann::json::array({creator, true}));
        });
    }

    AccountBundle account(const EntityAnchor&) const override {
        throw UnsupportedByChain("accounts on chain " + entry_.chain);
    }

    std::vector<std::string> block_ids() const override {
        throw AdapterUnavailable("block enumeration requires a fixture backend");
    }

    std::vector<std::string> transaction_ids(const std::string& block_id) const override {
        std::string hash = block_id;
        if (is_hex_hash(hash)) hash = hash.substr(2);
        nlohmann::json result = transport_->call("getblock", nlohmann::json::array({hash, 1}));
        if (result.is_null()) throw NotFound("block " + block_id);
        std::vector<std::string> out;
        for (const auto& t : result.at("tx")) out.push_back("0x" + t.get<std::string>());
        return out;
    }

    std::vector<std::string> account_ids() const override {
        throw UnsupportedByChain("accounts on chain " + entry_.chain);
    }

    std::string chain_id() const override { return entry_.chain; }
    std::string chain_descriptor_id() const override { return entry_.chain_descriptor; }

private:
    std::shared_ptr<RpcTransport> transport_;
    SourceConfigEntry entry_;
};

// Builds a live adapter for an rpc source-config entry over the given
// transport. Only Bitcoin and Ethereum carry live mappings; the other chains
// are served by fixtures.
inline std::shared_ptr<Adapter> make_rpc_adapter(const SourceConfigEntry& entry,
                                                 std::shared_ptr<RpcTransport> transport) {
    if (entry.chain == "eth") return std::make_shared<EthRpcAdapter>(std::move(transport), entry);
    if (entry.chain == "btc") return std::make_shared<BtcRpcAdapter>(std::move(transport), entry);
    throw AdapterUnavailable("no live node mapping for chain " + entry.chain +
                             "; use a fixture backend");
}

}  // namespace ccql
