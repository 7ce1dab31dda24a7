#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mev/chain.hpp"

namespace mev {

enum class EventKind { swap_v2, swap_v3, liquidation_aave, liquidation_compound };

std::string_view to_string(EventKind k);
std::optional<EventKind> event_kind_from_string(std::string_view s);

struct RegistryEntry {
    Hash32 topic;
    std::string family;  // free-form protocol label, e.g. "uniswap_v2", "quickswap"
    EventKind kind;
    std::string signature;
};

/// Topic-0 lookup table for the events the pipeline decodes.
/// Topics are always computed from the canonical signature text, never entered by hand.
class EventRegistry {
public:
    /// Registry with the shipped entries (Uniswap V2/V3 swaps, Aave and Compound liquidations).
    static EventRegistry with_defaults();

    /// Parses "signature family kind" lines; '#' starts a comment.
    static std::vector<RegistryEntry> parse_entries(std::string_view text, const std::string& source = "<text>");

    /// Throws ConfigError on a duplicate topic.
    void add(std::string signature, std::string family, EventKind kind);
    void add_entries(const std::vector<RegistryEntry>& entries);
    void load_extension(const std::filesystem::path& path);

    const RegistryEntry* find(const Hash32& topic) const;
    const std::vector<RegistryEntry>& entries() const { return entries_; }

    /// Recomputes every topic from its signature; false if any disagrees.
    bool verify() const;

private:
    std::vector<RegistryEntry> entries_;
    std::unordered_map<Hash32, std::size_t> by_topic_;
};

/// Registry entries shipped with the tool, in the extension-file text format.
extern const char* const kDefaultRegistryText;

struct PoolMetadata {
    Address pool;
    Address token0;
    Address token1;
    unsigned decimals0 = 18;
    unsigned decimals1 = 18;
    PoolFamily family = PoolFamily::v2;
    std::optional<std::uint32_t> fee_tier;

    bool operator==(const PoolMetadata&) const = default;
};

/// Supplies pool token metadata to the classifier. Must be safe for concurrent use.
class PoolMetadataSource {
public:
    virtual ~PoolMetadataSource() = default;
    virtual std::optional<PoolMetadata> resolve(const Address& pool, PoolFamily family, std::uint64_t block) = 0;
};

struct SwapEvent {
    Hash32 tx_hash;
    std::uint64_t block_number = 0;
    std::uint64_t tx_index = 0;
    std::uint64_t log_index = 0;
    Address pool;
    Address token_in;
    Address token_out;
    U256 amount_in;
    U256 amount_out;
    Address initiator;  // transaction sender
    Address recipient;

    bool operator==(const SwapEvent&) const = default;
};

struct LiquidationEvent {
    Hash32 tx_hash;
    std::uint64_t block_number = 0;
    std::uint64_t tx_index = 0;
    std::uint64_t log_index = 0;
    std::string protocol;
    Address liquidator;
    Address borrower;
    Address debt_token;
    U256 debt_repaid;
    Address collateral_token;
    U256 collateral_seized;

    bool operator==(const LiquidationEvent&) const = default;
};

struct TxEvents {
    Hash32 tx_hash;
    std::uint64_t index = 0;
    Address initiator;
    std::vector<SwapEvent> swaps;              // by log index
    std::vector<LiquidationEvent> liquidations;  // by log index
};

struct DecodeDiagnostics {
    std::uint64_t total_logs = 0;
    std::uint64_t decoded = 0;
    std::uint64_t ignored_unregistered = 0;
    std::uint64_t malformed = 0;
    std::uint64_t unresolved_pool_swaps = 0;
    std::uint64_t reverted_transactions = 0;

    DecodeDiagnostics& operator+=(const DecodeDiagnostics& o);
    bool operator==(const DecodeDiagnostics&) const = default;
};

struct ClassifiedBlock {
    std::uint64_t block_number = 0;
    std::uint64_t timestamp = 0;
    std::vector<TxEvents> transactions;  // by transaction index, one group per transaction
    DecodeDiagnostics diagnostics;
};

/// Both decoders throw MalformedSwap for amounts that do not describe one direction and
/// DecodeError for structural problems (short data, wrong topic count).
SwapEvent decode_v2_swap(const LogRecord& log, const PoolMetadata& meta);
SwapEvent decode_v3_swap(const LogRecord& log, const PoolMetadata& meta);
/// Dispatches on the registered kind of topic 0. Throws DecodeError on layout mismatch or
/// when an amount is zero.
LiquidationEvent decode_liquidation(const LogRecord& log, EventKind kind, std::string protocol);
LiquidationEvent decode_liquidation(const LogRecord& log, const EventRegistry& registry);

ClassifiedBlock classify_block(const BlockData& block, const EventRegistry& registry, PoolMetadataSource& metadata);

}  // namespace mev
