#include <catch2/catch_amalgamated.hpp>

#include "ccql/format.hpp"
#include "support/table_io.hpp"

using namespace ccql;
namespace ts = ccql::testsupport;

namespace {

ResultTable sample_table() {
    ResultTable table;
    table.columns = {
        {"1.Block.id", ValueKind::Hash, Multiplicity::Single},
        {"1.Block.height", ValueKind::Int, Multiplicity::Single},
        {"1.BlockDescriptor.transactions", ValueKind::HashList, Multiplicity::List},
        {"1.Transaction.value", ValueKind::Amount, Multiplicity::Single},
        {"1.Network.isTest", ValueKind::Bool, Multiplicity::Single},
        {"1.Chain.name", ValueKind::String, Multiplicity::Single},
    };
    table.rows.push_back({Value(std::string("0xfb2e00000000000000000000000014505661")),
                          Value(std::int64_t{14505661}),
                          Value(StringList{"0xaaaa000000000011", "0xbbbb000000000022"}),
                          Value(Amount("123456789012345678901234567890")), Value(false),
                          Value(std::string("Chain, with \"quirks\""))});
    table.rows.push_back({Value(), Value(), Value(StringList{}), Value(), Value(),
                          Value(std::string(""))});
    return table;
}

}  // namespace

TEST_CASE("table format truncates hash cells only") {
    std::string out = render_table(sample_table());
    CHECK(out.find("0xfb2e1234") == std::string::npos);
    CHECK(out.find("0xfb2e0000[…]") != std::string::npos);          // hash cell
    CHECK(out.find("0xaaaa0000[…]") != std::string::npos);          // hash inside a list
    CHECK(out.find("123456789012345678901234567890") != std::string::npos);  // amounts exact
    CHECK(out.find("1.Block.id") != std::string::npos);
    CHECK(out.find(" | ") != std::string::npos);
}

TEST_CASE("csv round-trips the table exactly") {
    ResultTable table = sample_table();
    std::string csv = render_csv(table);
    // machine formats never truncate
    CHECK(csv.find("0xfb2e00000000000000000000000014505661") != std::string::npos);
    ResultTable back = ts::table_from_csv(csv);
    CHECK(back == table);
}

TEST_CASE("csv quoting follows RFC 4180") {
    std::string csv = render_csv(sample_table());
    CHECK(csv.find("\"Chain, with \"\"quirks\"\"\"") != std::string::npos);
    // list cells serialize as one quoted cell
    CHECK(csv.find("\"[0xaaaa000000000011, 0xbbbb000000000022]\"") != std::string::npos);
}

TEST_CASE("csv distinguishes null from the empty string") {
    std::string csv = render_csv(sample_table());
    ResultTable back = ts::table_from_csv(csv);
    CHECK(is_null(back.rows[1][0]));
    CHECK(back.rows[1][5] == Value(std::string("")));
}

TEST_CASE("json round-trips the table exactly") {
    ResultTable table = sample_table();
    ResultTable back = ts::table_from_json(render_json(table));
    CHECK(back == table);
}

TEST_CASE("json carries kinds, exact amounts and typed nulls") {
    std::string out = render_json(sample_table());
    auto doc = nlohmann::json::parse(out);
    CHECK(doc.at("columns").at(3).at("kind") == "AMOUNT");
    CHECK(doc.at("rows").at(0).at(3) == "123456789012345678901234567890");
    CHECK(doc.at("rows").at(1).at(0).is_null());
    CHECK(doc.at("rows").at(0).at(1) == 14505661);
    CHECK(doc.at("rows").at(0).at(4) == false);
}

TEST_CASE("output format names resolve") {
    CHECK(output_format_from_name("table") == OutputFormat::Table);
    CHECK(output_format_from_name("csv") == OutputFormat::Csv);
    CHECK(output_format_from_name("json") == OutputFormat::Json);
    CHECK_THROWS_AS(output_format_from_name("yaml"), InvalidParams);
}
