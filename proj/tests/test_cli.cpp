#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "ccql/format.hpp"
#include "support/table_io.hpp"

namespace fs = std::filesystem;
namespace ts = ccql::testsupport;

namespace {

const std::string kTool = CCQL_TOOL_PATH;
const std::string kFixtureDir = CCQL_FIXTURE_DIR;
const std::string kConfig = kFixtureDir + "/ccql-sources";

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out += c;
    }
    out += "'";
    return out;
}

RunResult run_cli(const std::string& args, const std::string& stdin_text = "") {
    static int counter = 0;
    fs::path dir = fs::temp_directory_path() / ("ccql-cli-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    fs::path out = dir / ("out" + std::to_string(counter));
    fs::path err = dir / ("err" + std::to_string(counter));
    fs::path in = dir / ("in" + std::to_string(counter));
    ++counter;
    {
        std::ofstream f(in, std::ios::binary);
        f << stdin_text;
    }
    std::string cmd = shell_quote(kTool) + " " + args + " < " + shell_quote(in.string()) +
                      " > " + shell_quote(out.string()) + " 2> " + shell_quote(err.string());
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string example1 =
    "Q Block.id, Block.height, Block.timestamp, BlockDescriptor.transactions "
    "S eth:main:1:b/14505661 F Block.timestamp >= 1650000000;";

}  // namespace

TEST_CASE("one-shot table output matches the documented header") {
    RunResult r = run_cli("--config " + shell_quote(kConfig) + " --query " + shell_quote(example1));
    CHECK(r.exit_code == 0);
    CHECK(r.err.empty());
    // header row: the four column names in order, ' | ' separated (padded)
    std::string header = r.out.substr(0, r.out.find('\n'));
    std::vector<std::string> names;
    std::size_t pos = 0;
    while (pos != std::string::npos) {
        std::size_t sep = header.find(" | ", pos);
        std::string cell = header.substr(pos, sep == std::string::npos ? sep : sep - pos);
        while (!cell.empty() && cell.back() == ' ') cell.pop_back();
        names.push_back(cell);
        pos = sep == std::string::npos ? sep : sep + 3;
    }
    CHECK(names == std::vector<std::string>{"1.Block.id", "1.Block.height",
                                            "1.Block.timestamp",
                                            "1.BlockDescriptor.transactions"});
    CHECK(r.out.find("14505661") != std::string::npos);
    // display truncation of hashes
    CHECK(r.out.find("0xfb2e0000[…]") != std::string::npos);
}

TEST_CASE("csv output is exact and parseable") {
    RunResult r = run_cli("--config " + shell_quote(kConfig) + " --format csv --query " +
                          shell_quote(example1));
    CHECK(r.exit_code == 0);
    ccql::ResultTable table = ts::table_from_csv(r.out);
    REQUIRE(table.rows.size() == 1);
    CHECK(std::get<std::int64_t>(table.rows[0][1]) == 14505661);
    CHECK(std::get<std::string>(table.rows[0][0]).size() == 66);  // full hash
}

TEST_CASE("json output carries kinds") {
    RunResult r = run_cli("--config " + shell_quote(kConfig) + " --format json --query " +
                          shell_quote(example1));
    CHECK(r.exit_code == 0);
    auto table = ts::table_from_json(r.out);
    REQUIRE(table.columns.size() == 4);
    CHECK(table.columns[1].kind == ccql::ValueKind::Int);
}

TEST_CASE("exit code 1 for syntax errors, message on stderr") {
    RunResult r = run_cli("--config " + shell_quote(kConfig) + " --query " +
                          shell_quote("Q Block.id S eth:main:1"));
    CHECK(r.exit_code == 1);
    CHECK(r.out.empty());
    CHECK(r.err.find("offset") != std::string::npos);
}

TEST_CASE("exit code 2 for validation and planning errors") {
    RunResult r1 = run_cli("--config " + shell_quote(kConfig) + " --query " +
                           shell_quote("Q Account.balance S btc:main:0;"));
    CHECK(r1.exit_code == 2);
    RunResult r2 = run_cli("--config " + shell_quote(kConfig) + " --query " +
                           shell_quote("Q Chain.id S doge:main:7;"));
    CHECK(r2.exit_code == 2);
    RunResult r3 = run_cli("--config " + shell_quote(kConfig) + " --query " +
                           shell_quote("Q Block.colour S eth:main:1;"));
    CHECK(r3.exit_code == 2);
}

TEST_CASE("exit code 3 for adapter errors") {
    RunResult r = run_cli("--config " + shell_quote(kConfig) + " --query " +
                          shell_quote("Q Block.id S eth:main:1:b/123;"));
    CHECK(r.exit_code == 3);
    CHECK(r.out.empty());
    CHECK(r.err.find("not found") != std::string::npos);
}

TEST_CASE("missing config is reported") {
    RunResult r = run_cli("--config /no/such/file --query " + shell_quote(example1));
    CHECK(r.exit_code == 2);
    CHECK(!r.err.empty());
}

TEST_CASE("repl runs statements, recovers from errors and honors commands") {
    std::string session;
    session += "\\schema Block\n";
    session += "Q Block.id S eth:main:1\n";   // unterminated yet: continues
    session += ";\n";                          // completes the statement
    session += "Q nonsense;\n";                // parse error, session continues
    session += "Q Chain.id, Chain.name\n  S btc:main:0;\n";
    session += "\\sources\n";
    session += "\\q\n";
    RunResult r = run_cli("--config " + shell_quote(kConfig), session);
    CHECK(r.exit_code == 0);
    // \schema output
    CHECK(r.out.find("linkDescriptor LIST_OF_HASH list") != std::string::npos);
    // first statement result (multi-line input)
    CHECK(r.out.find("1.Block.id") != std::string::npos);
    // error printed to stderr, later statement still ran
    CHECK(!r.err.empty());
    CHECK(r.out.find("1.Chain.name") != std::string::npos);
    CHECK(r.out.find("Bitcoin") != std::string::npos);
    // \sources lists the five configured backends
    CHECK(r.out.find("eth:main:1  fixture") != std::string::npos);
    CHECK(r.out.find("avax:main:x  fixture") != std::string::npos);
}

TEST_CASE("repl handles two statements on one line") {
    RunResult r = run_cli("--config " + shell_quote(kConfig),
                          "Q Chain.id S btc:main:0; Q Chain.id S eth:main:1;\n\\q\n");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("btc") != std::string::npos);
    CHECK(r.out.find("eth") != std::string::npos);
}

TEST_CASE("dump-schema emits the machine-readable catalog") {
    RunResult r = run_cli("--dump-schema");
    CHECK(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.out);
    CHECK(doc.at("classes").size() == 14);
    bool found = false;
    for (const auto& jc : doc.at("classes")) {
        if (jc.at("name") == "UTXO") {
            found = true;
            CHECK(jc.at("attributes").size() == 4);
        }
    }
    CHECK(found);
}
