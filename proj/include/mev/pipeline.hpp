#pragma once

#include <chrono>
#include <iosfwd>
#include <memory>

#include "mev/analytics.hpp"
#include "mev/ingestion.hpp"

namespace mev {

/// Everything needed to talk to one chain: transport, block source, and state reader.
struct ChainConnection {
    std::shared_ptr<RpcTransport> transport;
    std::shared_ptr<RpcClient> client;
    std::unique_ptr<RpcBlockSource> blocks;
    std::unique_ptr<RpcStateReader> state;
};

/// `endpoint_override` (e.g. from the environment) replaces the config's rpc_endpoint when non-empty.
ChainConnection connect(const ChainConfig& cfg, const std::string& endpoint_override = {});

/// Registry with the shipped entries plus the config's extension files.
EventRegistry registry_for(const ChainConfig& cfg);

struct BlockResult {
    BlockCoverage coverage;
    MevFindings findings;
    std::vector<PricedMevRecord> records;
};

struct InspectSummary {
    std::uint64_t blocks = 0;
    std::uint64_t arbitrages = 0;
    std::uint64_t sandwiches = 0;
    std::uint64_t liquidations = 0;
    std::uint64_t unpriced = 0;
    double elapsed_seconds = 0;

    double blocks_per_second() const { return elapsed_seconds > 0 ? blocks / elapsed_seconds : 0.0; }
    /// One-line JSON for the final stdout line.
    std::string json_line() const;
};

struct InspectOptions {
    unsigned parallelism = 1;
    std::uint64_t progress_every = 100;
    std::ostream* progress = nullptr;  // progress lines; null for silence
};

/// fetch -> classify -> detect -> price on worker threads, persistence in block order on the
/// calling thread. Work proceeds in batches of the config's blocks_per_batch.
class Inspector {
public:
    Inspector(const ChainConfig& cfg, BlockSource& source, StateReader& state, Store& store);

    /// Everything but persistence, for one block. Safe to call concurrently.
    BlockResult inspect_one(std::uint64_t number);

    /// On failure throws FetchError naming the first failing block; blocks before it are persisted.
    InspectSummary run(std::uint64_t from, std::uint64_t to, const InspectOptions& options = {});

    PriceOracle& oracle() { return oracle_; }

private:
    const ChainConfig& cfg_;
    BlockSource& source_;
    Store& store_;
    EventRegistry registry_;
    PoolMetadataResolver metadata_;
    PriceOracle oracle_;
};

}  // namespace mev
