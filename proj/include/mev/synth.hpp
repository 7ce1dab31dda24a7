#pragma once

// Synthetic chain corpora with planted MEV and decoys, plus the manifest that says what a
// correct inspector must find. Also exposes the event/state builders so tests can hand-craft
// small fixtures.

#include <filesystem>
#include <set>

#include "mev/detector.hpp"
#include "mev/simulated_node.hpp"

namespace mev::synth {

// ----- builders

/// Deterministic address derived from a label.
Address labeled_address(std::string_view label);
Hash32 labeled_hash(std::string_view label);

/// Swap log for `pool` moving `amount_in` of `token_in` in and `amount_out` of the other token out.
LogRecord swap_log(const SimPool& pool, const Address& token_in, const U256& amount_in, const U256& amount_out,
                   const Address& sender, const Address& recipient);
LogRecord v2_swap_log(const Address& pool, const U256& amount0_in, const U256& amount1_in, const U256& amount0_out,
                      const U256& amount1_out, const Address& sender, const Address& recipient);
LogRecord v3_swap_log(const Address& pool, bool amount0_negative, const U256& amount0, bool amount1_negative,
                      const U256& amount1, const Address& sender, const Address& recipient);
LogRecord aave_liquidation_log(const Address& lending_pool, const Address& collateral, const Address& debt,
                               const Address& borrower, const U256& debt_to_cover, const U256& collateral_seized,
                               const Address& liquidator);
LogRecord compound_liquidation_log(const Address& borrowed_market, const Address& liquidator, const Address& borrower,
                                   const U256& repay_amount, const Address& collateral_market, const U256& seize_tokens);
LogRecord transfer_log(const Address& token, const Address& from, const Address& to, const U256& amount);

/// floor(sqrt(raw1 / raw0) * 2^96): the V3 price matching a reserve ratio.
U256 sqrt_price_x96_for(const U256& raw0, const U256& raw1);

// ----- corpus

struct CorpusOptions {
    std::uint64_t chain_id = 31337;
    std::uint64_t first_block = 1'000'000;
    std::uint64_t blocks = 60;
    std::uint64_t start_timestamp = 1'640'995'200;  // 2022-01-01T00:00:00Z
    std::uint64_t block_time = 1800;
    std::uint64_t seed = 7;
    unsigned arbitrages = 24;
    unsigned sandwiches = 4;
    unsigned liquidations = 3;
    unsigned unpriced_arbitrages = 1;  // profit taken in a token with no USDC or native pool
    unsigned background_txs = 6;       // decoy and filler transactions per block
    bool decoys = true;
};

struct PlantedArbitrage {
    std::uint64_t block = 0;
    Hash32 tx_hash;
    std::vector<std::uint64_t> log_indices;
    Address profit_token;
    I256 profit_raw;
    bool priced = true;
};

struct PlantedSandwich {
    std::uint64_t block = 0;
    Hash32 frontrun_tx;
    Hash32 backrun_tx;
    std::vector<Hash32> victim_txs;
    Address profit_token;
    I256 profit_raw;
};

struct PlantedLiquidation {
    std::uint64_t block = 0;
    Hash32 tx_hash;
    std::uint64_t log_index = 0;
    std::string protocol;
    bool priced = true;
};

struct DecoyCounts {
    std::uint64_t malformed = 0;
    std::uint64_t unresolved = 0;
    std::uint64_t unregistered = 0;
    std::uint64_t reverted = 0;
    std::uint64_t near_miss_sandwiches = 0;
};

struct Manifest {
    std::uint64_t chain_id = 0;
    std::uint64_t first_block = 0;
    std::uint64_t last_block = 0;
    std::vector<PlantedArbitrage> arbitrages;
    std::vector<PlantedSandwich> sandwiches;
    std::vector<PlantedLiquidation> liquidations;
    DecoyCounts decoys;
    std::vector<Address> unpriced_tokens;

    json to_json() const;
    static Manifest from_json(const json& j);
};

struct Corpus {
    ChainConfig config;
    ChainState state;
    std::vector<BlockData> blocks;
    Manifest manifest;
};

Corpus generate_corpus(const CorpusOptions& options);

struct CorpusPaths {
    std::filesystem::path config;    // chain.yaml, endpoint fixture:state.json
    std::filesystem::path state;     // state.json
    std::filesystem::path blocks;    // blocks.ndjson
    std::filesystem::path manifest;  // manifest.json
};

CorpusPaths write_corpus(const Corpus& corpus, const std::filesystem::path& dir);
Manifest load_manifest(const std::filesystem::path& path);

struct MatchReport {
    std::uint64_t true_positives = 0;
    std::uint64_t false_positives = 0;
    std::uint64_t false_negatives = 0;
    std::vector<std::string> mismatches;  // human-readable, one per error

    double precision() const;
    double recall() const;
    bool exact() const { return false_positives == 0 && false_negatives == 0; }
};

/// Compares detected findings to the plants. Arbitrages match on (tx, log set), sandwiches on
/// (front-run, back-run, victims), liquidations on (tx, log index).
MatchReport match_manifest(const Manifest& manifest, const std::vector<MevFindings>& findings);

}  // namespace mev::synth
