#include <catch2/catch_amalgamated.hpp>

#include <memory>
#include <random>

#include "ccql/engine.hpp"
#include "ccql/format.hpp"
#include "ccql/generate.hpp"
#include "support/reference_eval.hpp"

using namespace ccql;
namespace ts = ccql::testsupport;

namespace {

const std::string kFixtureDir = CCQL_FIXTURE_DIR;
const std::string kEthTx1 =
    "0x000000000000000000000000000000000000000000000000000000000000e1f1";
const std::string kAvaxTx0 =
    "0x00000000000000000000000000000000000000000000000000000000000a7af0";

SourceRegistry file_registry() {
    return SourceRegistry::from_file(kFixtureDir + "/ccql-sources");
}

SourceRegistry registry_of(std::initializer_list<FixtureChain> chains) {
    SourceRegistry reg;
    for (const FixtureChain& fc : chains) {
        reg.add_fixture(std::make_shared<const FixtureChain>(fc));
    }
    return reg;
}

std::string example1_statement() {
    return "Q Block.id, Block.height, Block.timestamp, BlockDesc.transactions "
           "S eth:main:1:b/14505661 F Block.timestamp >= 1650000000;";
}

}  // namespace

TEST_CASE("plan: block-level statement has Block grain") {
    auto reg = file_registry();
    auto p = plan(parse(example1_statement()), reg);
    CHECK(p.grain_class.at(1) == "Block");
    CHECK(p.per_source_attrs.at(1).size() == 4);
    // the alias is canonicalized during planning
    CHECK(p.per_source_attrs.at(1)[3].class_name == "BlockDescriptor");
}

TEST_CASE("plan: transaction attributes set transaction grain") {
    auto reg = file_registry();
    auto p = plan(parse("Q Transaction.id S eth:main:1:b/14505661;"), reg);
    CHECK(p.grain_class.at(1) == "Transaction");
}

TEST_CASE("plan: attribute applicable to no source fails") {
    auto reg = file_registry();
    CHECK_THROWS_AS(plan(parse("Q Account.balance S btc:main:0;"), reg),
                    InapplicableAttribute);
    // applicable to one of two sources is fine
    REQUIRE_NOTHROW(plan(parse("Q Account.balance S btc:main:0, eth:main:1;"), reg));
}

TEST_CASE("plan: catalog and registry violations") {
    auto reg = file_registry();
    CHECK_THROWS_AS(plan(parse("Q Rocket.id S eth:main:1;"), reg), UnknownClass);
    CHECK_THROWS_AS(plan(parse("Q Block.colour S eth:main:1;"), reg), UnknownAttribute);
    CHECK_THROWS_AS(plan(parse("Q Chain.id S doge:main:0;"), reg), UnknownSource);
    CHECK_THROWS_AS(plan(parse("Q Chain.id S eth:main:1 F 3.Chain.id = 'x';"), reg),
                    UnknownColumn);
}

TEST_CASE("plan: unprefixed filter over several applicable sources is ambiguous") {
    auto reg = file_registry();
    CHECK_THROWS_AS(
        plan(parse("Q Transaction.id S eth:main:1, btc:main:0 F Transaction.id = 0xff;"), reg),
        AmbiguousFilterAttribute);
    // a unique applicable source binds without the prefix
    REQUIRE_NOTHROW(
        plan(parse("Q Transaction.id S eth:main:1, btc:main:0 F Account.balance > 0;"), reg));
}

TEST_CASE("query example 1: one row with the documented values") {
    auto reg = file_registry();
    ResultTable table = run_statement(example1_statement(), reg);
    REQUIRE(table.columns.size() == 4);
    CHECK(table.columns[0].name == "1.Block.id");
    CHECK(table.columns[1].name == "1.Block.height");
    CHECK(table.columns[2].name == "1.Block.timestamp");
    CHECK(table.columns[3].name == "1.BlockDescriptor.transactions");
    REQUIRE(table.rows.size() == 1);
    CHECK(std::get<std::string>(table.rows[0][0]).rfind("0xfb2e", 0) == 0);
    CHECK(std::get<std::int64_t>(table.rows[0][1]) == 14505661);
    CHECK(std::get<StringList>(table.rows[0][3]).size() == 2);
}

TEST_CASE("query example 2: two-source transaction query keeps source prefixes") {
    auto reg = file_registry();
    ResultTable table = run_statement("Q Transaction.id, Transaction.value S eth:main:1:t/" +
                                          kEthTx1 + ", avax:main:x:t/" + kAvaxTx0 + ";",
                                      reg);
    REQUIRE(table.columns.size() == 4);
    CHECK(table.columns[0].name == "1.Transaction.id");
    CHECK(table.columns[1].name == "1.Transaction.value");
    CHECK(table.columns[2].name == "2.Transaction.id");
    CHECK(table.columns[3].name == "2.Transaction.value");
    REQUIRE(table.rows.size() == 1);
    CHECK(is_hex_hash(std::get<std::string>(table.rows[0][0])));
    CHECK(is_hex_hash(std::get<std::string>(table.rows[0][2])));
}

TEST_CASE("cartesian product cardinality without filters") {
    auto reg = registry_of({generate_chain(31, ChainModel::Utxo, 3, 1),
                            generate_chain(32, ChainModel::Account, 4, 1)});
    ResultTable table =
        run_statement("Q Transaction.id S syn_utxo:s31:1, syn_account:s32:1;", reg);
    CHECK(table.rows.size() == 12);
}

TEST_CASE("rows follow on-chain order and the product is lexicographic") {
    auto fc = generate_chain(33, ChainModel::Utxo, 3, 2);
    auto reg = registry_of({fc});
    ResultTable table = run_statement("Q Transaction.id S syn_utxo:s33:1;", reg);
    std::vector<std::string> expected;
    for (const BlockRecord& b : fc.blocks) {
        for (const std::string& txid : b.descriptor.transactions) expected.push_back(txid);
    }
    REQUIRE(table.rows.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(std::get<std::string>(table.rows[i][0]) == expected[i]);
    }
}

TEST_CASE("equality join matches the nested-loop reference evaluator") {
    auto a = generate_chain(41, ChainModel::Account, 5, 3);
    auto b = generate_chain(42, ChainModel::Account, 4, 2);
    auto reg = registry_of({a, b});
    std::string text =
        "Q Transaction.id, Transaction.to, Transaction.from, Transaction.value "
        "S syn_account:s41:1, syn_account:s42:1 "
        "F 1.Transaction.to = 2.Transaction.to;";
    ResultTable engine_out = run_statement(text, reg);
    ts::ReferenceEvaluator oracle({&a, &b});
    ResultTable oracle_out = oracle.evaluate(parse(text));
    REQUIRE(engine_out.rows.size() > 0);
    CHECK(engine_out == oracle_out);
}

TEST_CASE("join with no matches is empty on both paths") {
    auto a = generate_chain(43, ChainModel::Account, 3, 2);
    auto b = generate_chain(44, ChainModel::Account, 3, 2);
    auto reg = registry_of({a, b});
    // recipients never equal the faucet, so to = from cannot match
    std::string text =
        "Q Transaction.to, Transaction.from S syn_account:s43:1, syn_account:s44:1 "
        "F 1.Transaction.to = 2.Transaction.from;";
    ResultTable engine_out = run_statement(text, reg);
    ts::ReferenceEvaluator oracle({&a, &b});
    CHECK(engine_out.rows.empty());
    CHECK(engine_out == oracle.evaluate(parse(text)));
}

TEST_CASE("filters may reference unprojected attributes (hidden columns)") {
    auto reg = file_registry();
    ResultTable table =
        run_statement("Q Block.id S eth:main:1:b/14505661 F Block.timestamp >= 1650000000;",
                      reg);
    REQUIRE(table.columns.size() == 1);  // the hidden timestamp column is dropped
    CHECK(table.columns[0].name == "1.Block.id");
    CHECK(table.rows.size() == 1);

    ResultTable none =
        run_statement("Q Block.id S eth:main:1:b/14505661 F Block.timestamp > 1650000012;",
                      reg);
    CHECK(none.rows.empty());
}

TEST_CASE("reflexive >= on the block's own timestamp keeps the row") {
    auto reg = file_registry();
    ResultTable table = run_statement(
        "Q Block.timestamp S eth:main:1:b/14505661 F Block.timestamp >= 1650000012;", reg);
    CHECK(table.rows.size() == 1);
    ResultTable eq = run_statement(
        "Q Block.height S eth:main:1:b/14505661 F Block.height = 14505661;", reg);
    CHECK(eq.rows.size() == 1);
}

TEST_CASE("list-valued attributes filter by membership") {
    auto reg = file_registry();
    ResultTable in = run_statement("Q Block.id S eth:main:1:b/14505661 "
                                   "F BlockDesc.transactions = " + kEthTx1 + ";",
                                   reg);
    CHECK(in.rows.size() == 1);
    ResultTable out = run_statement(
        "Q Block.id S eth:main:1:b/14505661 F BlockDesc.transactions = 0xdead;", reg);
    CHECK(out.rows.empty());
}

TEST_CASE("null never satisfies a comparison") {
    auto reg = file_registry();
    // bitcoin transactions have null from/to
    ResultTable eq = run_statement(
        "Q Transaction.id S btc:main:0 F Transaction.from = 0xab;", reg);
    CHECK(eq.rows.empty());
    ResultTable neq = run_statement(
        "Q Transaction.id S btc:main:0 F Transaction.from != 0xab;", reg);
    CHECK(neq.rows.empty());
}

TEST_CASE("comparison rules reject incompatible kinds") {
    auto reg = file_registry();
    CHECK_THROWS_AS(
        run_statement("Q Block.id S eth:main:1:b/14505661 F Block.id < 0xff;", reg),
        TypeMismatch);
    CHECK_THROWS_AS(
        run_statement("Q Block.id S eth:main:1:b/14505661 F Block.id = 5;", reg),
        TypeMismatch);
    CHECK_THROWS_AS(
        run_statement("Q Network.isTest S eth:main:1 F Network.isTest < true;", reg),
        TypeMismatch);
}

TEST_CASE("account enumeration rows with denormalized unique siblings") {
    auto fc = generate_chain(45, ChainModel::Account, 4, 2);
    auto reg = registry_of({fc});
    ResultTable table =
        run_statement("Q Account.id, Account.balance, Chain.name S syn_account:s45:1;", reg);
    CHECK(table.rows.size() == fc.accounts.size());
    for (const auto& row : table.rows) {
        CHECK(std::get<std::string>(row[2]) == "Synthetic account chain");
    }
}

TEST_CASE("anchored account rows carry their tokens through the containment path") {
    auto fc = generate_chain(46, ChainModel::Account, 4, 2);
    std::string holder;
    for (const auto& [addr, acc] : fc.accounts) {
        if (!acc.tokens.empty()) holder = addr;
    }
    REQUIRE(!holder.empty());
    auto reg = registry_of({fc});
    ResultTable table = run_statement(
        "Q Token.symbol, Account.id S syn_account:s46:1:a/" + holder + ";", reg);
    REQUIRE(table.rows.size() == 1);
    CHECK(std::get<std::string>(table.rows[0][0]) == "SYN");
    CHECK(std::get<std::string>(table.rows[0][1]) == holder);
}

TEST_CASE("projection soundness: cells equal direct adapter reads") {
    auto fc = generate_chain(47, ChainModel::Account, 4, 3);
    auto chain = std::make_shared<const FixtureChain>(fc);
    auto reg = registry_of({fc});
    ResultTable table = run_statement(
        "Q Transaction.id, Transaction.value, Block.height S syn_account:s47:1;", reg);
    FixtureAdapter adapter(chain);
    REQUIRE(table.rows.size() == 12);
    for (const auto& row : table.rows) {
        std::string txid = std::get<std::string>(row[0]);
        TransactionBundle t = adapter.transaction({AnchorKind::Transaction, txid});
        CHECK(row[1] == t.tx.attr("value"));
        BlockBundle b = adapter.block({AnchorKind::Block, t.block_id});
        CHECK(row[2] == b.block.attr("height"));
    }
}

TEST_CASE("missing anchors surface as NotFound at execution") {
    auto reg = file_registry();
    auto p = plan(parse("Q Block.id S eth:main:1:b/7;"), reg);
    CHECK_THROWS_AS(execute(p), NotFound);
}

TEST_CASE("execution over fixtures is deterministic") {
    auto reg = file_registry();
    std::string a = render_csv(run_statement(example1_statement(), reg));
    std::string b = render_csv(run_statement(example1_statement(), reg));
    CHECK(a == b);
}

// -- filter laws over random tables ------------------------------------------

namespace {

ResultTable random_table(std::mt19937_64& rng) {
    auto pick = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    ResultTable table;
    int n_cols = pick(1, 4);
    for (int c = 0; c < n_cols; ++c) {
        ValueKind kind;
        switch (pick(0, 3)) {
            case 0: kind = ValueKind::Int; break;
            case 1: kind = ValueKind::Amount; break;
            case 2: kind = ValueKind::Hash; break;
            default: kind = ValueKind::Bool; break;
        }
        table.columns.push_back({"1.T.c" + std::to_string(c), kind, Multiplicity::Single});
    }
    int n_rows = pick(0, 25);
    for (int r = 0; r < n_rows; ++r) {
        std::vector<Value> row;
        for (int c = 0; c < n_cols; ++c) {
            if (pick(0, 5) == 0) {
                row.push_back(Value());
                continue;
            }
            switch (table.columns[c].kind) {
                case ValueKind::Int: row.push_back(Value(std::int64_t(pick(-5, 5)))); break;
                case ValueKind::Amount: row.push_back(Value(Amount(pick(0, 5)))); break;
                case ValueKind::Hash:
                    row.push_back(Value("0x" + std::string(1, "0123456789abcdef"[pick(0, 15)])));
                    break;
                default: row.push_back(Value(pick(0, 1) == 0)); break;
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

TableFilter random_filter(std::mt19937_64& rng, const ResultTable& table) {
    auto pick = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    TableFilter f;
    f.left = static_cast<std::size_t>(pick(0, static_cast<int>(table.columns.size()) - 1));
    ValueKind kind = table.columns[f.left].kind;
    bool ordered = kind == ValueKind::Int || kind == ValueKind::Amount;
    f.cmp = ordered ? static_cast<Comparison>(pick(0, 5))
                    : (pick(0, 1) == 0 ? Comparison::Eq : Comparison::Neq);
    // same-kind column on the right, else a literal
    std::vector<std::size_t> same;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (table.columns[c].kind == kind) same.push_back(c);
    }
    if (pick(0, 2) == 0 && !same.empty()) {
        f.rhs = same[static_cast<std::size_t>(pick(0, static_cast<int>(same.size()) - 1))];
        return f;
    }
    switch (kind) {
        case ValueKind::Int: f.rhs = Value(std::int64_t(pick(-5, 5))); break;
        case ValueKind::Amount: f.rhs = Value(Amount(pick(0, 5))); break;
        case ValueKind::Hash:
            f.rhs = Value("0x" + std::string(1, "0123456789abcdef"[pick(0, 15)]));
            break;
        default: f.rhs = Value(pick(0, 1) == 0); break;
    }
    return f;
}

bool contains_row(const ResultTable& table, const std::vector<Value>& row) {
    for (const auto& r : table.rows) {
        if (r == row) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("filter laws: subset, idempotence, permutation invariance") {
    std::mt19937_64 rng(99);
    for (int round = 0; round < 60; ++round) {
        ResultTable table = random_table(rng);
        std::vector<TableFilter> filters;
        int n = std::uniform_int_distribution<int>(1, 3)(rng);
        for (int i = 0; i < n; ++i) filters.push_back(random_filter(rng, table));

        ResultTable result = table;
        for (const TableFilter& f : filters) {
            ResultTable next = apply_filter(result, f);
            CHECK(next.rows.size() <= result.rows.size());
            for (const auto& row : next.rows) CHECK(contains_row(result, row));
            // idempotence
            CHECK(apply_filter(next, f).rows == next.rows);
            result = std::move(next);
        }
        // permutation invariance of the final row list
        std::vector<TableFilter> reversed(filters.rbegin(), filters.rend());
        ResultTable other = table;
        for (const TableFilter& f : reversed) other = apply_filter(other, f);
        CHECK(other.rows == result.rows);
    }
}
