#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <vector>

#include "mev/detector.hpp"
#include "mev/pricing.hpp"

struct sqlite3;

namespace mev {

struct BlockCoverage {
    std::uint64_t block = 0;
    std::uint64_t timestamp = 0;
    std::uint64_t tx_count = 0;
    DecodeDiagnostics diagnostics;

    bool operator==(const BlockCoverage&) const = default;
};

struct RangeQuery {
    std::vector<PricedMevRecord> records;         // by (block, tx index, ordinal)
    std::map<std::uint64_t, BlockCoverage> coverage;  // every persisted block in range
};

struct BlockInterval {
    std::uint64_t from = 0;
    std::uint64_t to = 0;
    bool operator==(const BlockInterval&) const = default;
};

std::string describe(const std::vector<BlockInterval>& gaps);

/// Single-file embedded store of per-block findings and priced records.
/// One writer; readers may open the same file concurrently.
class Store {
public:
    explicit Store(const std::filesystem::path& path);
    ~Store();
    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    /// Replaces everything stored for the block in one transaction. A no-op when the stored
    /// content is already identical. Throws PreconditionError when findings or records belong
    /// to another block, StorageError on I/O failure (the block is then left uninspected).
    void persist_block_findings(std::uint64_t chain_id, const BlockCoverage& block, const MevFindings& findings,
                                const std::vector<PricedMevRecord>& records);

    RangeQuery query_range(std::uint64_t chain_id, std::uint64_t from, std::uint64_t to) const;
    std::vector<BlockInterval> missing_intervals(std::uint64_t chain_id, std::uint64_t from, std::uint64_t to) const;
    /// Stored findings of one block as JSON (paths, victims, liquidation legs); null when absent.
    std::string findings_json(std::uint64_t chain_id, std::uint64_t block) const;

private:
    sqlite3* db_ = nullptr;
};

enum class ExportFormat { csv, jsonl };

inline constexpr std::string_view kRecordCsvHeader =
    "chain_id,block,day_utc,tx_hash,kind,profit_token,profit_raw,usd_profit,route,path_length";

/// Deterministic export ordered by (block, tx index, ordinal).
void export_records(std::vector<PricedMevRecord> records, std::uint64_t chain_id, ExportFormat format,
                    const std::filesystem::path& path);

json findings_to_json(const MevFindings& findings);

}  // namespace mev
