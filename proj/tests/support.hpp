#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "mev/pipeline.hpp"
#include "mev/synth.hpp"

namespace testing_support {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& content);

mev::Address addr(std::uint64_t n);
mev::Hash32 tx(std::uint64_t n);

mev::SwapEvent swap(std::uint64_t tx_n, std::uint64_t log_index, std::uint64_t pool_n, std::uint64_t token_in_n,
                    std::uint64_t token_out_n, mev::U256 amount_in, mev::U256 amount_out, std::uint64_t initiator_n = 1,
                    std::uint64_t tx_index = 0);

/// Small hand-built chain: USDC(6), WETH(18), WNATIVE(18), TOK (18, native pool only), LONE (no pools).
struct MiniChain {
    mev::ChainConfig config;
    mev::ChainState state;
    mev::Address usdc, weth, wnative, tok, lone;
    mev::Address v2_factory, v3_factory;
    mev::Address usdc_weth_v2, native_usdc_v2, tok_native_v2, weth_usdc_v3_500, weth_usdc_v3_3000;
};
MiniChain mini_chain();

/// Runs the CLI; returns the exit status and captures stdout/stderr.
struct CliResult {
    int status = -1;
    std::string out;
    std::string err;
};
CliResult run_cli(const std::string& args, const std::string& env = {});


/// Exhaustive cycle reference: each unused swap, in log order, starts the longest valid cycle
/// found by trying every subset of the unused swaps after it (ties: smallest index sequence).
/// Returns index sequences into `swaps`. Intended for at most ~12 swaps.
std::vector<std::vector<std::size_t>> reference_cycles(const std::vector<mev::SwapEvent>& swaps);

/// Random single-transaction swap list of 0..6 swaps over 4 tokens and 4 pools, biased
/// toward chaining so cycles are common.
std::vector<mev::SwapEvent> random_swap_tx(std::mt19937_64& rng);

}  // namespace testing_support
