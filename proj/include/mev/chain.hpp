#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mev/primitives.hpp"

namespace mev {

enum class PoolFamily { v2, v3 };

std::string_view to_string(PoolFamily f);
PoolFamily pool_family_from_string(std::string_view s);

struct DexFactory {
    Address address;
    PoolFamily family = PoolFamily::v2;
    std::vector<std::uint32_t> fee_tiers;  // v3 only
    std::string label;
};

struct RetryPolicy {
    unsigned attempts = 5;
    std::chrono::milliseconds base_delay{100};
    unsigned factor = 2;

    std::chrono::milliseconds delay_before(unsigned attempt) const;  // attempt >= 1
};

struct ChainConfig {
    std::uint64_t chain_id = 0;
    std::string name;
    std::string rpc_endpoint;
    Address native_wrapped_token;
    Address usdc_token;
    std::vector<DexFactory> dex_factories;
    bool sandwiches_possible = false;
    std::uint64_t blocks_per_batch = 100;
    unsigned max_parallel_requests = 8;
    /// Price through the wrapped native token when no direct USDC pool exists.
    bool native_hop_pricing = true;
    RetryPolicy retry;
    std::vector<std::filesystem::path> registry_extensions;
    std::map<Address, std::string> token_labels;
    /// Directory of the config file; relative paths in the config resolve against it.
    std::filesystem::path base_dir;

    /// Throws ConfigError on a violated invariant.
    void validate() const;
    std::string token_label(const Address& token) const;
};

/// Loads a YAML chain config. Relative paths are resolved against the file's directory.
ChainConfig load_chain_config(const std::filesystem::path& path);
ChainConfig parse_chain_config(std::string_view yaml_text, const std::filesystem::path& base_dir = {});
std::string dump_chain_config(const ChainConfig& cfg);

// ----- block data

struct LogRecord {
    Address address;
    std::vector<Hash32> topics;  // at most 4
    Bytes data;
    std::uint64_t log_index = 0;

    bool operator==(const LogRecord&) const = default;
};

enum class TxStatus { success, reverted };

struct TransactionRecord {
    Hash32 hash;
    std::uint64_t index = 0;
    Address sender;
    std::optional<Address> recipient;
    std::uint64_t gas_used = 0;
    TxStatus status = TxStatus::success;
    std::vector<LogRecord> logs;

    bool operator==(const TransactionRecord&) const = default;
};

struct BlockData {
    std::uint64_t number = 0;
    std::uint64_t timestamp = 0;
    std::vector<TransactionRecord> transactions;

    bool operator==(const BlockData&) const = default;

    /// Throws PreconditionError describing the first broken ordering/log invariant.
    void validate() const;
};

}  // namespace mev
