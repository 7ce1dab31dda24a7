#include <gtest/gtest.h>

#include "mev/analytics.hpp"
#include "mev/simulated_node.hpp"
#include "support.hpp"

using namespace mev;
namespace ts = testing_support;

namespace {

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

// Small planted corpus written through the CLI; returns the config path.
std::filesystem::path synth_corpus(const ts::TempDir& dir, unsigned blocks = 12) {
    const auto r = ts::run_cli("fixture synth --out " + q(dir / "corpus") + " --blocks " + std::to_string(blocks) +
                               " --arbitrages 6 --sandwiches 2 --liquidations 2");
    EXPECT_EQ(r.status, 0) << r.err;
    return dir / "corpus" / "chain.yaml";
}

constexpr std::uint64_t kFirst = 1'000'000;

}  // namespace

TEST(Cli, MissingConfigIsUsageError) {
    ts::TempDir dir;
    auto r = ts::run_cli("inspect " + q(dir / "nope.yaml") + " --from 1 --to 2 --store " + q(dir / "s.db"));
    EXPECT_EQ(r.status, 2);
    r = ts::run_cli("");
    EXPECT_EQ(r.status, 2);
    r = ts::run_cli("report --store x");
    EXPECT_EQ(r.status, 2);
}

TEST(Cli, ShippedConfigsParse) {
    for (const char* name : {"polygon.yaml", "arbitrum.yaml", "optimism.yaml"}) {
        const auto cfg = load_chain_config(std::filesystem::path(CONFIGS_DIR) / name);
        EXPECT_NO_THROW(cfg.validate()) << name;
        EXPECT_EQ(cfg.sandwiches_possible, std::string(name) == "polygon.yaml") << name;
    }
}

TEST(Cli, InspectReportAndIdempotentRerun) {
    ts::TempDir dir;
    const auto cfg = synth_corpus(dir);
    const std::string range = " --from " + std::to_string(kFirst) + " --to " + std::to_string(kFirst + 11);
    auto r = ts::run_cli("inspect " + q(cfg) + range + " --parallelism 4 --store " + q(dir / "s.db"));
    ASSERT_EQ(r.status, 0) << r.err;
    const auto summary = json::parse(r.out);
    EXPECT_EQ(summary.at("blocks"), 12);
    EXPECT_EQ(summary.at("arbitrages"), 6);
    EXPECT_EQ(summary.at("sandwiches"), 2);
    EXPECT_EQ(summary.at("liquidations"), 2);
    EXPECT_NE(r.err.find("progress: block"), std::string::npos);

    const std::string exp = "export --store " + q(dir / "s.db") + " --chain 31337" + range + " --out ";
    ASSERT_EQ(ts::run_cli(exp + q(dir / "a.csv")).status, 0);
    r = ts::run_cli("inspect " + q(cfg) + range + " --store " + q(dir / "s.db"));
    ASSERT_EQ(r.status, 0) << r.err;
    ASSERT_EQ(ts::run_cli(exp + q(dir / "b.csv")).status, 0);
    EXPECT_EQ(ts::read_file(dir / "a.csv"), ts::read_file(dir / "b.csv"));

    r = ts::run_cli("report --store " + q(dir / "s.db") + " --chain 31337" + range + " --out " + q(dir / "rep") +
                    " --config " + q(cfg));
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find("MEV report"), std::string::npos);
    for (const char* f : {"report.txt", "stats_profit.csv", "stats_tx_count.csv", "histogram_100.csv", "histogram_10.csv",
                          "histogram_1.csv", "top_tokens.csv"}) {
        EXPECT_TRUE(std::filesystem::exists(dir / "rep" / f)) << f;
    }
}

TEST(Cli, ReportGapExitsOne) {
    ts::TempDir dir;
    const auto cfg = synth_corpus(dir);
    auto r = ts::run_cli("inspect " + q(cfg) + " --from " + std::to_string(kFirst) + " --to " +
                         std::to_string(kFirst + 4) + " --store " + q(dir / "s.db"));
    ASSERT_EQ(r.status, 0) << r.err;
    r = ts::run_cli("report --store " + q(dir / "s.db") + " --chain 31337 --from " + std::to_string(kFirst) + " --to " +
                    std::to_string(kFirst + 8) + " --out " + q(dir / "rep"));
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.err.find("missing blocks: " + std::to_string(kFirst + 5) + "-" + std::to_string(kFirst + 8)),
              std::string::npos)
        << r.err;

    // --resume fills exactly the gap.
    r = ts::run_cli("inspect " + q(cfg) + " --from " + std::to_string(kFirst) + " --to " + std::to_string(kFirst + 8) +
                    " --resume --store " + q(dir / "s.db"));
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(json::parse(r.out).at("blocks"), 4);
}

TEST(Cli, EmptyInspectedRangeReportsZero) {
    ts::TempDir dir;
    {
        Store s(dir / "s.db");
        for (std::uint64_t b = 1; b <= 3; ++b) {
            MevFindings f;
            f.block_number = b;
            s.persist_block_findings(5, {b, 1'700'000'000 + b, 0, {}}, f, {});
        }
    }
    const auto r = ts::run_cli("report --store " + q(dir / "s.db") + " --chain 5 --from 1 --to 3 --out " + q(dir / "rep"));
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find("total USD profit:      0.000000"), std::string::npos) << r.out;
}

TEST(Cli, PriceCommand) {
    ts::TempDir dir;
    auto m = ts::mini_chain();
    write_chain_state(m.state, dir / "state.json");
    ts::write_file(dir / "mini.yaml", dump_chain_config(m.config));
    const std::string base = "price " + q(dir / "mini.yaml") + " --block 1 --token ";

    auto r = ts::run_cli(base + m.usdc.hex());
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out, "1.0 direct_usdc\n");
    r = ts::run_cli(base + m.tok.hex());
    EXPECT_EQ(r.out, "0.125 via_native\n");
    r = ts::run_cli(base + m.lone.hex());
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "unpriced\n");
    EXPECT_EQ(ts::run_cli(base + "0x12").status, 2);
}

TEST(Cli, FixtureRecordAndValidate) {
    ts::TempDir dir;
    const auto cfg = synth_corpus(dir);
    auto r = ts::run_cli("fixture record " + q(cfg) + " --from " + std::to_string(kFirst) + " --to " +
                         std::to_string(kFirst + 4) + " --out " + q(dir / "rec.ndjson"));
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(load_fixture(dir / "rec.ndjson").blocks.size(), 5u);
    r = ts::run_cli("fixture validate " + q(dir / "rec.ndjson"));
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "ok\n");

    std::string text = ts::read_file(dir / "rec.ndjson");
    const auto third = text.find('\n', text.find('\n') + 1) + 1;
    text.insert(third + 10, "}{garbage");
    ts::write_file(dir / "bad.ndjson", text);
    r = ts::run_cli("fixture validate " + q(dir / "bad.ndjson"));
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;

    r = ts::run_cli("fixture record " + q(cfg) + " --from 10 --to 9 --out " + q(dir / "x.ndjson"));
    EXPECT_EQ(r.status, 2);
}

TEST(Cli, EndpointOverrideFromEnvironment) {
    ts::TempDir dir;
    const auto cfg = synth_corpus(dir, 6);
    const auto r = ts::run_cli("inspect " + q(cfg) + " --from " + std::to_string(kFirst) + " --to " +
                                   std::to_string(kFirst + 1) + " --store " + q(dir / "s.db"),
                               "MEVINSPECT_RPC_URL=http://127.0.0.1:1");
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.err.find("unreachable"), std::string::npos) << r.err;
}
