#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "mev/detector.hpp"
#include "mev/state_reader.hpp"

namespace mev {

/// Price of token1 quoted in token0, in human units. nullopt for a drained pool.
std::optional<Rational> spot_price_v2(const U256& reserve0, const U256& reserve1, unsigned decimals0,
                                      unsigned decimals1);
/// Same quote from a V3 sqrtPriceX96. nullopt for a zero input.
std::optional<Rational> spot_price_v3(const U256& sqrt_price_x96, unsigned decimals0, unsigned decimals1);

enum class PriceRoute { direct_usdc, via_native, unpriced };

std::string_view to_string(PriceRoute r);
PriceRoute price_route_from_string(std::string_view s);

struct TokenPrice {
    Address token;
    std::uint64_t block_number = 0;
    std::optional<Rational> usd_price;  // present iff route != unpriced
    PriceRoute route = PriceRoute::unpriced;
    std::vector<Address> source_pools;  // at most two
};

enum class FindingKind { arbitrage, sandwich, liquidation };

std::string_view to_string(FindingKind k);
FindingKind finding_kind_from_string(std::string_view s);

struct PricedMevRecord {
    FindingKind kind = FindingKind::arbitrage;
    std::uint64_t block_number = 0;
    std::uint64_t timestamp = 0;
    std::string day;  // UTC, YYYY-MM-DD
    Hash32 tx_hash;   // sandwiches: the back-run transaction
    std::uint64_t tx_index = 0;
    std::uint32_t ordinal = 0;  // finding number within tx_hash
    Address profit_token;
    I256 profit_raw;
    std::optional<Fixed6> usd_profit;  // absent when unpriced
    PriceRoute route = PriceRoute::unpriced;
    std::uint32_t path_length = 0;  // swaps in the finding; 0 for liquidations

    bool operator==(const PricedMevRecord&) const = default;
};

/// A pool usable for pricing a token against a quote token.
struct PoolQuote {
    Address pool;
    PoolFamily family = PoolFamily::v2;
    std::uint32_t fee_tier = 0;
    Address token0;
    Address token1;
    BigInt liquidity;  // V3 in-range liquidity; V2 uses floor(sqrt(reserve0 * reserve1))
};

/// Block-pinned USD pricing over on-chain DEX pools. Thread-safe.
class PriceOracle {
public:
    PriceOracle(const ChainConfig& cfg, StateReader& reader);

    /// Deepest pool pairing `token` with `quote` across the configured factories at `block`.
    /// Ties prefer the lowest fee tier, then factory order.
    std::optional<PoolQuote> find_pool(const Address& token, const Address& quote, std::uint64_t block);
    std::optional<PoolQuote> find_usdc_pool(const Address& token, std::uint64_t block) {
        if (token == cfg_.usdc_token) return std::nullopt;
        return find_pool(token, cfg_.usdc_token, block);
    }

    /// Throws RpcError when state reads fail after retries (distinct from unpriced).
    TokenPrice price_token_usd(const Address& token, std::uint64_t block);

    /// One record per finding, priced at the finding's own block. Ordinals are assigned per
    /// transaction in (tx index, kind, first log index) order.
    std::vector<PricedMevRecord> price_findings(const MevFindings& findings);

    std::optional<unsigned> token_decimals(const Address& token, std::uint64_t block);

private:
    std::optional<Rational> price_in(const PoolQuote& pool, const Address& token, std::uint64_t block);
    std::optional<Fixed6> usd_value(const I256& raw, const Address& token, const TokenPrice& price, std::uint64_t block);

    const ChainConfig& cfg_;
    StateReader& reader_;
    std::mutex mutex_;
    std::map<std::pair<Address, std::uint64_t>, TokenPrice> price_cache_;
    std::map<std::tuple<Address, Address, Address, std::uint32_t>, Address> pool_cache_;  // positive lookups only
    std::map<Address, std::optional<unsigned>> decimals_cache_;
};

}  // namespace mev
