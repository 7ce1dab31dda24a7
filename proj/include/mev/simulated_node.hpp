#pragma once

// An in-process JSON-RPC node backed by fixture files: serves recorded blocks and answers
// the eth_call reads the pipeline makes (pool tokens, reserves, slot0, factory lookups)
// from a declarative contract-state file.

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>

#include "mev/chain.hpp"
#include "mev/rpc.hpp"

namespace mev {

struct SimToken {
    Address address;
    unsigned decimals = 18;
    std::string symbol;
};

/// Pool state in effect from `block` until the next point.
struct PoolStatePoint {
    std::uint64_t block = 0;
    U256 reserve0 = 0;        // v2
    U256 reserve1 = 0;        // v2
    U256 sqrt_price_x96 = 0;  // v3
    U256 liquidity = 0;       // v3
};

struct SimPool {
    Address address;
    Address factory;
    PoolFamily family = PoolFamily::v2;
    std::uint32_t fee = 0;  // v3 fee tier
    Address token0;
    Address token1;
    std::vector<PoolStatePoint> history;  // ascending by block; the pool does not exist before the first

    const PoolStatePoint* state_at(std::uint64_t block) const;
};

struct ChainState {
    std::uint64_t chain_id = 0;
    std::vector<SimToken> tokens;
    std::vector<SimPool> pools;
};

struct ChainFixture {
    ChainState state;
    std::vector<BlockData> blocks;
};

inline constexpr std::string_view kStateFormat = "mevinspect-state";

json chain_state_to_json(const ChainState& state);
ChainState chain_state_from_json(const json& j);
/// Writes the state file; `blocks_fixture` (relative to the state file) is recorded when non-empty.
void write_chain_state(const ChainState& state, const std::filesystem::path& path,
                       const std::string& blocks_fixture = {});
/// Loads a state file and, when it names one, its blocks fixture.
ChainFixture load_chain_fixture(const std::filesystem::path& state_path);

class SimulatedNode final : public RpcTransport {
public:
    explicit SimulatedNode(ChainFixture fixture);

    json send(const json& request) override;

    /// When false, eth_getBlockReceipts answers "method not found".
    void set_block_receipts_supported(bool supported) { block_receipts_supported_ = supported; }
    /// Called before each request; returning true fails it with a transport error.
    void set_fault_injector(std::function<bool(const json& request)> injector);
    /// Artificial per-request latency.
    void set_latency(std::chrono::microseconds latency) { latency_ = latency; }

    std::uint64_t requests(const std::string& method) const;
    std::uint64_t total_requests() const { return total_.load(); }
    std::uint64_t head() const;

private:
    json dispatch(const std::string& method, const json& params);
    json eth_call(const json& params);
    json block_json(const BlockData& b) const;
    json receipts_json(const BlockData& b) const;
    const BlockData* block_by_tag(const json& tag) const;

    ChainState state_;
    std::map<std::uint64_t, BlockData> blocks_;
    std::map<Address, const SimPool*> pools_;
    std::map<Address, const SimToken*> tokens_;
    std::map<Hash32, std::pair<std::uint64_t, std::size_t>> tx_locator_;

    std::atomic<bool> block_receipts_supported_{true};
    std::chrono::microseconds latency_{0};
    mutable std::mutex mutex_;
    std::function<bool(const json&)> fault_injector_;
    std::map<std::string, std::uint64_t> per_method_;
    std::atomic<std::uint64_t> total_{0};
};

}  // namespace mev
