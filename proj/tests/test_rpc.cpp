#include <catch2/catch_amalgamated.hpp>

#include <memory>
#include <set>

#include "ccql/fixture.hpp"
#include "ccql/rpc.hpp"

using namespace ccql;

namespace {

const std::string kFixtureDir = CCQL_FIXTURE_DIR;

EthRpcAdapter eth_replay() {
    auto transport = std::make_shared<ReplayTransport>(
        ReplayTransport::from_file(kFixtureDir + "/recordings/eth-main.json"));
    return EthRpcAdapter(transport, {"eth", "main", "1", "rpc", "<replay>"});
}

BtcRpcAdapter btc_replay() {
    auto transport = std::make_shared<ReplayTransport>(
        ReplayTransport::from_file(kFixtureDir + "/recordings/btc-main.json"));
    return BtcRpcAdapter(transport, {"btc", "main", "0", "rpc", "<replay>"});
}

// field-by-field equality after null-normalization: absent and null agree
bool instances_match(const Instance& a, const Instance& b) {
    if (a.class_name != b.class_name) return false;
    std::set<std::string> names;
    for (const auto& [k, v] : a.attributes) names.insert(k);
    for (const auto& [k, v] : b.attributes) names.insert(k);
    for (const std::string& name : names) {
        if (!(a.attr(name) == b.attr(name))) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("recorded eth block maps onto the data model") {
    auto adapter = eth_replay();
    BlockBundle b = adapter.block({AnchorKind::Block, "14505661"});
    CHECK(std::get<std::int64_t>(b.block.attr("height")) == 14505661);
    CHECK(std::get<std::string>(b.block.attr("id")).rfind("0xfb2e", 0) == 0);
    CHECK(std::get<StringList>(b.descriptor.attr("transactions")).size() == 2);
    REQUIRE(b.validation.has_value());
    CHECK(!is_null(b.validation->attr("proposer")));
    CHECK(check_instance(b.block).empty());
    CHECK(check_instance(b.descriptor).empty());
}

TEST_CASE("eth adapter reports missing blocks as NotFound") {
    auto adapter = eth_replay();
    CHECK_THROWS_AS(adapter.block({AnchorKind::Block, "99999999"}), NotFound);
    CHECK_THROWS_AS(adapter.block_ids(), AdapterUnavailable);
}

TEST_CASE("adapter parity: live eth responses equal the fixture instances") {
    auto rpc = eth_replay();
    auto chain = std::make_shared<const FixtureChain>(
        load_fixture(kFixtureDir + "/eth-mainnet-replica.json"));
    FixtureAdapter fixture(chain);

    BlockBundle rb = rpc.block({AnchorKind::Block, "14505661"});
    BlockBundle fb = fixture.block({AnchorKind::Block, "14505661"});
    CHECK(instances_match(rb.block, fb.block));
    CHECK(instances_match(rb.descriptor, fb.descriptor));
    REQUIRE(rb.validation.has_value());
    REQUIRE(fb.validation.has_value());
    CHECK(instances_match(*rb.validation, *fb.validation));

    std::string txid = "0x000000000000000000000000000000000000000000000000000000000000e1f1";
    TransactionBundle rt = rpc.transaction({AnchorKind::Transaction, txid});
    TransactionBundle ft = fixture.transaction({AnchorKind::Transaction, txid});
    CHECK(instances_match(rt.tx, ft.tx));
    CHECK(instances_match(rt.descriptor, ft.descriptor));
    CHECK(rt.block_id == ft.block_id);

    std::string alice = "0x00000000000000000000000000000000000a11ce";
    // the fixture account and the balance call must agree
    AccountBundle ra = rpc.account({AnchorKind::Account, alice});
    AccountBundle fa = fixture.account({AnchorKind::Account, alice});
    CHECK(std::get<Amount>(ra.account.attr("balance")) ==
          std::get<Amount>(fa.account.attr("balance")));
}

TEST_CASE("recorded btc block and transaction map onto the data model") {
    auto adapter = btc_replay();
    BlockBundle b = adapter.block({AnchorKind::Block, "2"});
    CHECK(std::get<std::int64_t>(b.block.attr("height")) == 2);
    CHECK(std::get<StringList>(b.descriptor.attr("transactions")).size() == 2);

    std::string spend = "0x000000000000000000000000000000000000000000000000000000000000b5e1";
    TransactionBundle t = adapter.transaction({AnchorKind::Transaction, spend});
    StringList inputs = std::get<StringList>(t.descriptor.attr("utxoInputs"));
    REQUIRE(inputs.size() == 1);
    CHECK(inputs[0] ==
          "0x000000000000000000000000000000000000000000000000000000000000bc00:0");
    StringList outputs = std::get<StringList>(t.descriptor.attr("utxoOutputs"));
    CHECK(outputs.size() == 2);
    // inputs resolve through their creating transaction, then outputs follow
    REQUIRE(t.utxos.size() == 3);
    CHECK(std::get<Amount>(t.utxos[0].attr("value")) == Amount(5000000000LL));
    CHECK(std::get<bool>(t.utxos[0].attr("spent")) == true);
    CHECK(std::get<Amount>(t.utxos[1].attr("value")) == Amount(3000000000LL));
    CHECK(is_null(t.tx.attr("from")));
    CHECK(is_null(t.tx.attr("value")));
}

TEST_CASE("adapter parity: live btc responses equal the fixture instances") {
    auto rpc = btc_replay();
    auto chain =
        std::make_shared<const FixtureChain>(load_fixture(kFixtureDir + "/btc-main.json"));
    FixtureAdapter fixture(chain);

    BlockBundle rb = rpc.block({AnchorKind::Block, "2"});
    BlockBundle fb = fixture.block({AnchorKind::Block, "2"});
    CHECK(instances_match(rb.block, fb.block));
    CHECK(instances_match(rb.descriptor, fb.descriptor));

    std::string spend = "0x000000000000000000000000000000000000000000000000000000000000b5e1";
    TransactionBundle rt = rpc.transaction({AnchorKind::Transaction, spend});
    TransactionBundle ft = fixture.transaction({AnchorKind::Transaction, spend});
    CHECK(instances_match(rt.tx, ft.tx));
    CHECK(instances_match(rt.descriptor, ft.descriptor));
    REQUIRE(rt.utxos.size() == ft.utxos.size());
    for (std::size_t i = 0; i < rt.utxos.size(); ++i) {
        CHECK(instances_match(rt.utxos[i], ft.utxos[i]));
    }
}

TEST_CASE("btc accounts are unsupported, unknown chains have no live mapping") {
    auto adapter = btc_replay();
    CHECK_THROWS_AS(adapter.account({AnchorKind::Account, "1abc"}), UnsupportedByChain);
    CHECK_THROWS_AS(
        make_rpc_adapter({"sol", "main", "0", "rpc", "http://localhost"}, nullptr),
        AdapterUnavailable);
}
