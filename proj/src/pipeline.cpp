#include "mev/pipeline.hpp"

#include <cmath>
#include <ostream>

namespace mev {

ChainConnection connect(const ChainConfig& cfg, const std::string& endpoint_override) {
    ChainConnection c;
    const std::string endpoint = endpoint_override.empty() ? cfg.rpc_endpoint : endpoint_override;
    c.transport = make_transport(endpoint, cfg.base_dir);
    c.client = std::make_shared<RpcClient>(c.transport);
    c.blocks = std::make_unique<RpcBlockSource>(c.client, cfg.retry);
    c.state = std::make_unique<RpcStateReader>(c.client, cfg.retry);
    return c;
}

EventRegistry registry_for(const ChainConfig& cfg) {
    EventRegistry registry = EventRegistry::with_defaults();
    for (const auto& ext : cfg.registry_extensions) {
        registry.load_extension(ext);  // already resolved against the config's directory
    }
    return registry;
}

std::string InspectSummary::json_line() const {
    json j = {{"blocks", blocks},
              {"arbitrages", arbitrages},
              {"sandwiches", sandwiches},
              {"liquidations", liquidations},
              {"unpriced", unpriced},
              {"elapsed_s", std::round(elapsed_seconds * 1000) / 1000},
              {"blocks_per_s", std::round(blocks_per_second() * 10) / 10}};
    return j.dump();
}

Inspector::Inspector(const ChainConfig& cfg, BlockSource& source, StateReader& state, Store& store)
    : cfg_(cfg), source_(source), store_(store), registry_(registry_for(cfg)), metadata_(state), oracle_(cfg, state) {}

BlockResult Inspector::inspect_one(std::uint64_t number) {
    const BlockData block = source_.fetch_block(number);
    const ClassifiedBlock classified = classify_block(block, registry_, metadata_);
    BlockResult out;
    out.findings = inspect_block(classified, cfg_);
    out.records = oracle_.price_findings(out.findings);
    out.coverage = {block.number, block.timestamp, block.transactions.size(), classified.diagnostics};
    return out;
}

InspectSummary Inspector::run(std::uint64_t from, std::uint64_t to, const InspectOptions& options) {
    if (from > to) throw PreconditionError("empty range: from " + std::to_string(from) + " > to " + std::to_string(to));
    const auto start = std::chrono::steady_clock::now();
    InspectSummary summary;
    const std::uint64_t batch = std::max<std::uint64_t>(cfg_.blocks_per_batch, 1);
    const std::uint64_t total = to - from + 1;

    auto consume = [&](BlockResult&& r) {
        store_.persist_block_findings(cfg_.chain_id, r.coverage, r.findings, r.records);
        ++summary.blocks;
        summary.arbitrages += r.findings.arbitrages.size();
        summary.sandwiches += r.findings.sandwiches.size();
        summary.liquidations += r.findings.liquidations.size();
        for (const auto& rec : r.records) summary.unpriced += rec.usd_profit ? 0 : 1;
        if (options.progress && options.progress_every > 0 &&
            (summary.blocks % options.progress_every == 0 || summary.blocks == total)) {
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            *options.progress << "progress: block " << r.coverage.block << " (" << summary.blocks << "/" << total
                              << "), " << summary.arbitrages + summary.sandwiches + summary.liquidations
                              << " findings, " << static_cast<std::uint64_t>(secs > 0 ? summary.blocks / secs : 0)
                              << " blocks/s" << std::endl;
        }
    };

    for (std::uint64_t lo = from;; lo += batch) {
        const std::uint64_t hi = std::min(to, lo + batch - 1);
        ordered_parallel_for<BlockResult>(
            lo, hi, options.parallelism, [this](std::uint64_t n) { return inspect_one(n); }, consume);
        if (hi == to) break;
    }
    summary.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return summary;
}

}  // namespace mev
