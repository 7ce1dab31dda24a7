#pragma once

#include <optional>

#include "mev/chain.hpp"
#include "mev/rpc.hpp"

namespace mev {

/// Block-pinned contract reads (eth_call).
class StateReader {
public:
    virtual ~StateReader() = default;
    /// Return data of a call at `block`; nullopt when the call reverts or the target has no code.
    /// Throws RpcError for transport failures.
    virtual std::optional<Bytes> call(const Address& to, const Bytes& calldata, std::uint64_t block) = 0;
};

class RpcStateReader final : public StateReader {
public:
    RpcStateReader(std::shared_ptr<RpcClient> client, RetryPolicy retry) : client_(std::move(client)), retry_(retry) {}
    std::optional<Bytes> call(const Address& to, const Bytes& calldata, std::uint64_t block) override;

private:
    std::shared_ptr<RpcClient> client_;
    RetryPolicy retry_;
};

namespace signatures {
inline constexpr std::string_view kToken0 = "token0()";
inline constexpr std::string_view kToken1 = "token1()";
inline constexpr std::string_view kFee = "fee()";
inline constexpr std::string_view kDecimals = "decimals()";
inline constexpr std::string_view kGetReserves = "getReserves()";
inline constexpr std::string_view kSlot0 = "slot0()";
inline constexpr std::string_view kLiquidity = "liquidity()";
inline constexpr std::string_view kGetPair = "getPair(address,address)";
inline constexpr std::string_view kGetPool = "getPool(address,address,uint24)";
}  // namespace signatures

/// Typed wrappers over the calls the pipeline needs. Each returns nullopt when the
/// contract does not answer or answers with undecodable data.
namespace contract {

struct Reserves {
    U256 reserve0;
    U256 reserve1;
};

struct Slot0 {
    U256 sqrt_price_x96;
};

std::optional<Address> token0(StateReader& reader, const Address& pool, std::uint64_t block);
std::optional<Address> token1(StateReader& reader, const Address& pool, std::uint64_t block);
std::optional<std::uint32_t> fee(StateReader& reader, const Address& pool, std::uint64_t block);
std::optional<unsigned> decimals(StateReader& reader, const Address& token, std::uint64_t block);
std::optional<Reserves> get_reserves(StateReader& reader, const Address& pool, std::uint64_t block);
std::optional<Slot0> slot0(StateReader& reader, const Address& pool, std::uint64_t block);
std::optional<U256> liquidity(StateReader& reader, const Address& pool, std::uint64_t block);
/// nullopt when the factory has no pair (returns the zero address).
std::optional<Address> get_pair(StateReader& reader, const Address& factory, const Address& a, const Address& b,
                                std::uint64_t block);
std::optional<Address> get_pool(StateReader& reader, const Address& factory, const Address& a, const Address& b,
                                std::uint32_t fee, std::uint64_t block);

}  // namespace contract

}  // namespace mev
