// mevinspect: detect, price, store and report MEV on EVM chains.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mev/pipeline.hpp"
#include "mev/synth.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

constexpr const char* kEndpointEnv = "MEVINSPECT_RPC_URL";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string endpoint_override() {
    const char* v = std::getenv(kEndpointEnv);
    return v ? std::string(v) : std::string{};
}

mev::ChainConfig load_config(const std::string& path) {
    try {
        return mev::load_chain_config(path);
    } catch (const mev::ConfigError& e) {
        throw UsageError(e.what());
    }
}

void require_range(std::uint64_t from, std::uint64_t to) {
    if (from > to) throw UsageError("empty range: --from " + std::to_string(from) + " > --to " + std::to_string(to));
}

// ----- inspect

struct InspectArgs {
    std::string config;
    std::optional<std::uint64_t> from, to;
    std::string fixture;
    unsigned parallelism = 1;
    std::string store;
    std::uint64_t progress_every = 100;
    bool resume = false;
};

int cmd_inspect(const InspectArgs& a) {
    const mev::ChainConfig cfg = load_config(a.config);
    if (a.from.has_value() != a.to.has_value()) throw UsageError("--from and --to go together");
    if (!a.from && a.fixture.empty()) throw UsageError("give --from/--to or --fixture");
    if (a.parallelism < 1) throw UsageError("--parallelism must be >= 1");

    mev::ChainConnection conn = mev::connect(cfg, endpoint_override());
    std::unique_ptr<mev::FixtureBlockSource> fixture_source;
    mev::BlockSource* source = conn.blocks.get();
    std::uint64_t from = 0, to = 0;
    if (!a.fixture.empty()) {
        mev::BlockFixture fx = mev::load_fixture(a.fixture);
        if (fx.chain_id != cfg.chain_id) {
            throw UsageError("fixture is for chain " + std::to_string(fx.chain_id) + ", config for " +
                             std::to_string(cfg.chain_id));
        }
        fixture_source = std::make_unique<mev::FixtureBlockSource>(std::move(fx.blocks));
        const auto range = fixture_source->range();
        if (!range) throw UsageError("fixture " + a.fixture + " holds no blocks");
        from = a.from.value_or(range->first);
        to = a.to.value_or(range->second);
        source = fixture_source.get();
    } else {
        from = *a.from;
        to = *a.to;
        conn.blocks->verify_chain_id(cfg.chain_id);
    }
    require_range(from, to);

    mev::Store store(a.store);
    mev::Inspector inspector(cfg, *source, *conn.state, store);
    mev::InspectOptions opts;
    opts.parallelism = a.parallelism;
    opts.progress_every = a.progress_every;
    opts.progress = &std::cerr;

    std::vector<mev::BlockInterval> work{{from, to}};
    if (a.resume) work = store.missing_intervals(cfg.chain_id, from, to);
    mev::InspectSummary total;
    for (const auto& iv : work) {
        const auto s = inspector.run(iv.from, iv.to, opts);
        total.blocks += s.blocks;
        total.arbitrages += s.arbitrages;
        total.sandwiches += s.sandwiches;
        total.liquidations += s.liquidations;
        total.unpriced += s.unpriced;
        total.elapsed_seconds += s.elapsed_seconds;
    }
    std::cout << total.json_line() << std::endl;
    return kOk;
}

// ----- report / export

struct ReportArgs {
    std::string store;
    std::uint64_t chain = 0;
    std::uint64_t from = 0, to = 0;
    std::string reference_totals;
    std::string out = "report";
    std::string config;
};

int cmd_report(const ReportArgs& a) {
    require_range(a.from, a.to);
    std::optional<mev::ChainConfig> cfg;
    if (!a.config.empty()) cfg = load_config(a.config);
    if (!std::filesystem::exists(a.store)) throw UsageError("store " + a.store + " does not exist");
    const mev::Store store(a.store);
    mev::AggregateReport rep = mev::build_report(store, a.chain, a.from, a.to);
    if (!a.reference_totals.empty()) rep.reference_totals = mev::load_reference_totals(a.reference_totals);
    mev::write_report(rep, a.out, cfg ? &*cfg : nullptr);
    std::cout << mev::report_text(rep, cfg ? &*cfg : nullptr);
    return kOk;
}

struct ExportArgs {
    std::string store;
    std::uint64_t chain = 0;
    std::uint64_t from = 0, to = 0;
    std::string format = "csv";
    std::string out;
};

int cmd_export(const ExportArgs& a) {
    require_range(a.from, a.to);
    if (!std::filesystem::exists(a.store)) throw UsageError("store " + a.store + " does not exist");
    const mev::Store store(a.store);
    auto q = store.query_range(a.chain, a.from, a.to);
    mev::export_records(std::move(q.records), a.chain, a.format == "csv" ? mev::ExportFormat::csv : mev::ExportFormat::jsonl,
                        a.out);
    return kOk;
}

// ----- price

struct PriceArgs {
    std::string config;
    std::string token;
    std::uint64_t block = 0;
};

int cmd_price(const PriceArgs& a) {
    const mev::ChainConfig cfg = load_config(a.config);
    mev::Address token;
    try {
        token = mev::Address::from_hex(a.token);
    } catch (const std::exception& e) {
        throw UsageError(std::string("--token: ") + e.what());
    }
    mev::ChainConnection conn = mev::connect(cfg, endpoint_override());
    mev::PriceOracle oracle(cfg, *conn.state);
    const mev::TokenPrice p = oracle.price_token_usd(token, a.block);
    if (!p.usd_price) {
        std::cout << "unpriced" << std::endl;
    } else {
        std::cout << mev::rational_to_trimmed_decimal(*p.usd_price, 18) << ' ' << mev::to_string(p.route) << std::endl;
    }
    return kOk;
}

// ----- fixture

struct FixtureRecordArgs {
    std::string config;
    std::uint64_t from = 0, to = 0;
    std::string out;
};

int cmd_fixture_record(const FixtureRecordArgs& a) {
    const mev::ChainConfig cfg = load_config(a.config);
    require_range(a.from, a.to);
    mev::ChainConnection conn = mev::connect(cfg, endpoint_override());
    conn.blocks->verify_chain_id(cfg.chain_id);
    auto blocks = mev::stream_blocks(*conn.blocks, a.from, a.to, cfg.max_parallel_requests);
    mev::record_fixture(blocks, cfg.chain_id, a.out);
    std::cerr << "recorded " << blocks.size() << " blocks to " << a.out << std::endl;
    return kOk;
}

int cmd_fixture_validate(const std::string& path) {
    if (!std::filesystem::exists(path)) throw UsageError("no such file: " + path);
    mev::load_fixture(path);
    std::cout << "ok" << std::endl;
    return kOk;
}

struct SynthArgs {
    std::string out;
    mev::synth::CorpusOptions options;
};

int cmd_fixture_synth(const SynthArgs& a) {
    const auto corpus = mev::synth::generate_corpus(a.options);
    const auto paths = mev::synth::write_corpus(corpus, a.out);
    std::cout << paths.config.string() << std::endl;
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Detect, price, store and report MEV on EVM chains"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "mevinspect 0.1.0");

    InspectArgs inspect;
    auto* c_inspect = app.add_subcommand("inspect", "Inspect a block range and persist findings");
    c_inspect->add_option("config", inspect.config, "Chain config (YAML)")->required()->check(CLI::ExistingFile);
    c_inspect->add_option("--from", inspect.from, "First block");
    c_inspect->add_option("--to", inspect.to, "Last block");
    c_inspect->add_option("--fixture", inspect.fixture, "Read blocks from a fixture file")->check(CLI::ExistingFile);
    c_inspect->add_option("--parallelism", inspect.parallelism, "Worker threads")->capture_default_str();
    c_inspect->add_option("--store", inspect.store, "Store file")->required();
    c_inspect->add_option("--progress-every", inspect.progress_every, "Progress line interval (blocks)")
        ->capture_default_str();
    c_inspect->add_flag("--resume", inspect.resume, "Skip blocks already in the store");

    ReportArgs report;
    auto* c_report = app.add_subcommand("report", "Aggregate stored findings into report files");
    c_report->add_option("--store", report.store, "Store file")->required();
    c_report->add_option("--chain", report.chain, "Chain id")->required();
    c_report->add_option("--from", report.from, "First block")->required();
    c_report->add_option("--to", report.to, "Last block")->required();
    c_report->add_option("--reference-totals", report.reference_totals, "CSV of chain,usd_profit reference rows")
        ->check(CLI::ExistingFile);
    c_report->add_option("--out", report.out, "Output directory")->capture_default_str();
    c_report->add_option("--config", report.config, "Chain config, for token and chain names")
        ->check(CLI::ExistingFile);

    ExportArgs exp;
    auto* c_export = app.add_subcommand("export", "Export stored records");
    c_export->add_option("--store", exp.store, "Store file")->required();
    c_export->add_option("--chain", exp.chain, "Chain id")->required();
    c_export->add_option("--from", exp.from, "First block")->required();
    c_export->add_option("--to", exp.to, "Last block")->required();
    c_export->add_option("--format", exp.format, "csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}))
        ->capture_default_str();
    c_export->add_option("--out", exp.out, "Output file")->required();

    PriceArgs price;
    auto* c_price = app.add_subcommand("price", "USD price of a token at a block");
    c_price->add_option("config", price.config, "Chain config (YAML)")->required()->check(CLI::ExistingFile);
    c_price->add_option("--token", price.token, "Token address")->required();
    c_price->add_option("--block", price.block, "Block number")->required();

    auto* c_fixture = app.add_subcommand("fixture", "Record, validate or synthesize block fixtures");
    c_fixture->require_subcommand(1);
    FixtureRecordArgs record;
    auto* c_record = c_fixture->add_subcommand("record", "Record a block range to a fixture file");
    c_record->add_option("config", record.config, "Chain config (YAML)")->required()->check(CLI::ExistingFile);
    c_record->add_option("--from", record.from, "First block")->required();
    c_record->add_option("--to", record.to, "Last block")->required();
    c_record->add_option("--out", record.out, "Output fixture file")->required();
    std::string validate_path;
    auto* c_validate = c_fixture->add_subcommand("validate", "Check a fixture file");
    c_validate->add_option("path", validate_path, "Fixture file")->required();
    SynthArgs synth;
    auto* c_synth = c_fixture->add_subcommand("synth", "Generate a synthetic corpus with planted MEV");
    c_synth->add_option("--out", synth.out, "Output directory")->required();
    c_synth->add_option("--blocks", synth.options.blocks, "Number of blocks")->capture_default_str();
    c_synth->add_option("--first-block", synth.options.first_block, "First block number")->capture_default_str();
    c_synth->add_option("--seed", synth.options.seed, "RNG seed")->capture_default_str();
    c_synth->add_option("--arbitrages", synth.options.arbitrages, "Planted arbitrages")->capture_default_str();
    c_synth->add_option("--sandwiches", synth.options.sandwiches, "Planted sandwiches")->capture_default_str();
    c_synth->add_option("--liquidations", synth.options.liquidations, "Planted liquidations")->capture_default_str();
    c_synth->add_option("--background", synth.options.background_txs, "Filler and decoy transactions per block")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (c_inspect->parsed()) return cmd_inspect(inspect);
        if (c_report->parsed()) return cmd_report(report);
        if (c_export->parsed()) return cmd_export(exp);
        if (c_price->parsed()) return cmd_price(price);
        if (c_record->parsed()) return cmd_fixture_record(record);
        if (c_validate->parsed()) return cmd_fixture_validate(validate_path);
        if (c_synth->parsed()) return cmd_fixture_synth(synth);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << std::endl;
        return kUsage;
    } catch (const mev::FetchError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        std::cerr << "first failing block: " << e.block_number() << std::endl;
        return kFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kFailure;
    }
    return kUsage;
}
