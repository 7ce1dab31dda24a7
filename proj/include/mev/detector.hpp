#pragma once

#include <span>
#include <vector>

#include "mev/decoder.hpp"

namespace mev {

/// Closed cycle of swaps inside one transaction.
struct Arbitrage {
    Hash32 tx_hash;
    std::uint64_t block_number = 0;
    std::uint64_t tx_index = 0;
    std::vector<SwapEvent> path;  // chained: path[i].token_out == path[i+1].token_in
    Address profit_token;
    U256 start_amount;
    U256 end_amount;
    I256 profit_raw;  // end_amount - start_amount, may be negative

    bool operator==(const Arbitrage&) const = default;
};

struct Sandwich {
    std::uint64_t block_number = 0;
    SwapEvent frontrun;
    std::vector<SwapEvent> victims;
    SwapEvent backrun;
    Address profit_token;
    I256 profit_raw;  // backrun.amount_out - frontrun.amount_in

    bool operator==(const Sandwich&) const = default;
};

struct MevFindings {
    std::uint64_t block_number = 0;
    std::uint64_t timestamp = 0;
    std::vector<Arbitrage> arbitrages;
    std::vector<Sandwich> sandwiches;
    std::vector<LiquidationEvent> liquidations;
    DecodeDiagnostics diagnostics;

    bool empty() const { return arbitrages.empty() && sandwiches.empty() && liquidations.empty(); }
};

/// Swaps of one transaction, ordered by log index, to disjoint closed cycles.
///
/// Selection is greedy: walking swaps in log order, the earliest unused swap starts the
/// longest valid cycle among unused swaps (ties broken by the lexicographically smallest
/// log-index sequence). A valid cycle chains token_out to token_in with strictly increasing
/// log indices, returns to its starting token, and touches at least two pools. A swap that
/// starts no cycle is skipped as a start but stays available to later cycles.
std::vector<Arbitrage> detect_arbitrages(std::span<const SwapEvent> tx_swaps);

/// Front-run / victim / back-run triples per pool, scanned greedily in transaction order.
/// Swaps whose (tx_hash, log_index) appears in `claimed` are not eligible for any role.
std::vector<Sandwich> detect_sandwiches(const ClassifiedBlock& block, std::span<const SwapEvent> claimed = {});

std::vector<LiquidationEvent> extract_liquidations(const ClassifiedBlock& block);

/// Runs all detectors; arbitrage cycles claim their swaps before sandwich detection.
/// Sandwich detection only runs when the chain allows reordering.
MevFindings inspect_block(const ClassifiedBlock& block, const ChainConfig& cfg);

}  // namespace mev
