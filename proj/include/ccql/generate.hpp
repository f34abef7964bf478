#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "ccql/detail/sha256.hpp"
#include "ccql/errors.hpp"
#include "ccql/fixture.hpp"

namespace ccql {

enum class ChainModel { Utxo, Account, Dag };

inline const char* chain_model_name(ChainModel m) {
    switch (m) {
        case ChainModel::Utxo: return "utxo";
        case ChainModel::Account: return "account";
        case ChainModel::Dag: return "dag";
    }
    return "?";
}

namespace generate_detail {

inline std::string hash_of(const std::string& preimage) {
    return "0x" + detail::sha256_hex(preimage);
}

// Synthetic addresses depend only on their index so that fixtures generated
// from different seeds share an address pool and can be joined.
inline std::string synthetic_address(int k) {
    return "0x" + detail::sha256_hex("addr|" + std::to_string(k)).substr(0, 40);
}

inline Bytes short_bytes(const std::string& tag) {
    Bytes out;
    auto digest = detail::sha256(tag);
    out.assign(digest.begin(), digest.begin() + 8);
    return out;
}

}  // namespace generate_detail

// Deterministic synthetic chain: identical inputs yield byte-identical
// fixtures. Block id at height i is sha256 over
// "<chainDescriptorId>|<i>|<parentId>|<seed>" (genesis parent is the empty
// string); transaction ids use "<chainDescriptorId>|tx|<txCounter>|<blockId>|<seed>".
// Timestamps advance by 12 seconds per block from 1600000000.
inline FixtureChain generate_chain(std::int64_t seed, ChainModel model, int n_blocks,
                                   int tx_per_block) {
    namespace gd = generate_detail;
    if (n_blocks < 1) throw InvalidParams("n_blocks must be >= 1");
    if (tx_per_block < 0) throw InvalidParams("tx_per_block must be >= 0");
    if (seed < 0) throw InvalidParams("seed must be >= 0");

    FixtureChain fc;
    const std::string cd_id = "1";
    fc.chain.id = std::string("syn_") + chain_model_name(model);
    fc.chain.name = std::string("Synthetic ") + chain_model_name(model) + " chain";
    fc.network.id = "s" + std::to_string(seed);
    fc.network.name = "Synthetic network s" + std::to_string(seed);
    fc.network.is_test = true;
    fc.chain_descriptor.id = cd_id;
    fc.chain_descriptor.data_structure = model == ChainModel::Dag ? "blocks+dag" : "blocks";
    fc.chain_descriptor.consensus = "synthetic";

    const std::string seed_text = std::to_string(seed);
    const bool utxo_style = model == ChainModel::Utxo || model == ChainModel::Dag;

    // account-model bookkeeping: one faucet funds a rotating set of recipients
    const int n_recipients = 4;
    const std::string faucet = gd::synthetic_address(0);
    const Amount premine = Amount("1000000000000000");
    std::map<std::string, Amount> balances;
    if (!utxo_style) balances[faucet] = premine;

    std::deque<std::string> unspent;  // FIFO pool of spendable output ids
    std::string parent_id;
    std::int64_t tx_counter = 0;

    for (int i = 0; i < n_blocks; ++i) {
        BlockRecord block;
        block.id = gd::hash_of(cd_id + "|" + std::to_string(i) + "|" + parent_id + "|" + seed_text);
        block.height = i;
        block.timestamp = 1600000000 + 12 * static_cast<std::int64_t>(i);
        if (i > 0) block.link_descriptor.push_back(parent_id);
        block.descriptor.status = "main";
        block.descriptor.dag_support = model == ChainModel::Dag;
        if (model == ChainModel::Dag) {
            block.linked_block_descriptor.emplace();
            if (i > 0) {
                const BlockRecord& prev = fc.blocks.back();
                if (!prev.descriptor.transactions.empty()) {
                    block.linked_block_descriptor->push_back(prev.descriptor.transactions.front());
                }
            }
        }

        for (int j = 0; j < tx_per_block; ++j) {
            TransactionRecord tx;
            tx.id = gd::hash_of(cd_id + "|tx|" + std::to_string(tx_counter) + "|" + block.id +
                                "|" + seed_text);
            if (utxo_style) {
                // first transaction of a block mints; later ones split a
                // previous output into two of equal total value
                if (j == 0 || unspent.empty()) {
                    UtxoRecord out;
                    out.id = tx.id + ":0";
                    out.value = Amount(5000000000LL);
                    out.script = Bytes{0x51};
                    tx.utxo_outputs.push_back(out);
                } else {
                    std::string ref = unspent.front();
                    unspent.pop_front();
                    auto site = fc.utxo_site.at(ref);
                    UtxoRecord& consumed =
                        fc.transactions.at(site.first).utxo_outputs[site.second];
                    consumed.spent = true;
                    tx.utxo_inputs.push_back(ref);
                    Amount half = consumed.value / 2;
                    UtxoRecord out0{tx.id + ":0", half, Bytes{0x51}, false};
                    UtxoRecord out1{tx.id + ":1", consumed.value - half, Bytes{0x51}, false};
                    tx.utxo_outputs.push_back(out0);
                    tx.utxo_outputs.push_back(out1);
                }
                if (model == ChainModel::Dag) {
                    AssetRecord asset;
                    asset.id = "asset-" + std::to_string(tx_counter);
                    asset.name = "Synthetic asset " + std::to_string(tx_counter);
                    asset.amount = tx.utxo_outputs.front().value;
                    tx.assets.push_back(asset);
                }
                for (const UtxoRecord& out : tx.utxo_outputs) unspent.push_back(out.id);
            } else {
                std::string to = gd::synthetic_address(1 + static_cast<int>(tx_counter) % n_recipients);
                Amount value = Amount(100) * Amount(tx_counter + 1);
                tx.from = faucet;
                tx.to = to;
                tx.value = value;
                tx.data = gd::short_bytes("txdata|" + std::to_string(tx_counter));
                balances[faucet] -= value;
                balances[to] += value;
                if (tx_counter % 3 == 0) {
                    TokenRecord token;
                    token.id = gd::synthetic_address(100);
                    token.standard = "erc20";
                    token.name = "Synthetic token";
                    token.symbol = "SYN";
                    token.decimals = 18;
                    token.balance = std::nullopt;
                    tx.tokens.push_back(token);
                }
            }
            block.descriptor.transactions.push_back(tx.id);
            std::string txid = tx.id;
            for (std::size_t k = 0; k < tx.utxo_outputs.size(); ++k) {
                fc.utxo_site.emplace(tx.utxo_outputs[k].id, std::make_pair(txid, k));
            }
            fc.transactions.emplace(txid, std::move(tx));
            ++tx_counter;
        }

        ValidationRecord validation;
        validation.id = block.id + "/v";
        validation.hash_value = block.id;
        if (model == ChainModel::Dag) {
            validation.proposer = gd::synthetic_address(200);
            validation.attestations = {gd::synthetic_address(201), gd::synthetic_address(202)};
        } else {
            validation.proposer = gd::synthetic_address(200);
        }
        block.validation = std::move(validation);

        parent_id = block.id;
        fc.blocks.push_back(std::move(block));
    }

    if (model == ChainModel::Dag) {
        for (int k : {201, 202}) {
            ValidatorRecord v;
            v.id = gd::synthetic_address(k);
            v.vote = "accept";
            v.signature = gd::short_bytes("sig|" + std::to_string(k));
            fc.validators.emplace(v.id, v);
        }
    }
    if (!utxo_style) {
        for (const auto& [addr, balance] : balances) {
            AccountRecord acc;
            acc.id = addr;
            acc.balance = balance;
            if (addr != faucet) {
                TokenRecord token;
                token.id = gd::synthetic_address(100);
                token.standard = "erc20";
                token.name = "Synthetic token";
                token.symbol = "SYN";
                token.decimals = 18;
                token.balance = balance * 2;
                acc.tokens.push_back(token);
                DataRecord data;
                data.id = addr + "/store";
                data.kind = "keyvalue";
                data.payload = gd::short_bytes("data|" + addr);
                acc.data.push_back(data);
            }
            fc.accounts.emplace(addr, std::move(acc));
        }
    }

    fc.reindex();
    return fc;
}

}  // namespace ccql
