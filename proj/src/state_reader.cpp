#include "mev/state_reader.hpp"

#include "mev/abi.hpp"

namespace mev {

std::optional<Bytes> RpcStateReader::call(const Address& to, const Bytes& calldata, std::uint64_t block) {
    json params = json::array({json{{"to", to.hex()}, {"data", to_hex(calldata)}}, u64_to_quantity(block)});
    try {
        const json result = with_retry(retry_, [&] { return client_->call("eth_call", params); });
        if (!result.is_string()) return std::nullopt;
        Bytes out = from_hex(result.get<std::string>());
        if (out.empty()) return std::nullopt;
        return out;
    } catch (const RpcResponseError& e) {
        if (is_retriable(e)) throw;
        return std::nullopt;  // reverted
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

namespace contract {

namespace {

std::optional<Bytes> call0(StateReader& reader, const Address& to, std::string_view sig, std::uint64_t block) {
    return reader.call(to, abi::Encoder(sig).take(), block);
}

template <typename F>
auto decode_or_none(const std::optional<Bytes>& data, F&& f) -> std::optional<decltype(f(*data))> {
    if (!data) return std::nullopt;
    try {
        return f(*data);
    } catch (const DecodeError&) {
        return std::nullopt;
    }
}

}  // namespace

std::optional<Address> token0(StateReader& reader, const Address& pool, std::uint64_t block) {
    return decode_or_none(call0(reader, pool, signatures::kToken0, block),
                          [](const Bytes& d) { return abi::address_at(d, 0); });
}

std::optional<Address> token1(StateReader& reader, const Address& pool, std::uint64_t block) {
    return decode_or_none(call0(reader, pool, signatures::kToken1, block),
                          [](const Bytes& d) { return abi::address_at(d, 0); });
}

std::optional<std::uint32_t> fee(StateReader& reader, const Address& pool, std::uint64_t block) {
    auto v = decode_or_none(call0(reader, pool, signatures::kFee, block), [](const Bytes& d) { return abi::uint_at(d, 0); });
    if (!v || *v >= (U256(1) << 24)) return std::nullopt;
    return static_cast<std::uint32_t>(*v);
}

std::optional<unsigned> decimals(StateReader& reader, const Address& token, std::uint64_t block) {
    auto v = decode_or_none(call0(reader, token, signatures::kDecimals, block),
                            [](const Bytes& d) { return abi::uint_at(d, 0); });
    if (!v || *v > 255) return std::nullopt;
    return static_cast<unsigned>(*v);
}

std::optional<Reserves> get_reserves(StateReader& reader, const Address& pool, std::uint64_t block) {
    return decode_or_none(call0(reader, pool, signatures::kGetReserves, block), [](const Bytes& d) {
        return Reserves{abi::uint_at(d, 0), abi::uint_at(d, 1)};
    });
}

std::optional<Slot0> slot0(StateReader& reader, const Address& pool, std::uint64_t block) {
    return decode_or_none(call0(reader, pool, signatures::kSlot0, block),
                          [](const Bytes& d) { return Slot0{abi::uint_at(d, 0)}; });
}

std::optional<U256> liquidity(StateReader& reader, const Address& pool, std::uint64_t block) {
    return decode_or_none(call0(reader, pool, signatures::kLiquidity, block),
                          [](const Bytes& d) { return abi::uint_at(d, 0); });
}

std::optional<Address> get_pair(StateReader& reader, const Address& factory, const Address& a, const Address& b,
                                std::uint64_t block) {
    auto data = reader.call(factory, abi::Encoder(signatures::kGetPair).address(a).address(b).take(), block);
    auto pair = decode_or_none(data, [](const Bytes& d) { return abi::address_at(d, 0); });
    if (!pair || pair->is_zero()) return std::nullopt;
    return pair;
}

std::optional<Address> get_pool(StateReader& reader, const Address& factory, const Address& a, const Address& b,
                                std::uint32_t fee_tier, std::uint64_t block) {
    auto data = reader.call(factory, abi::Encoder(signatures::kGetPool).address(a).address(b).uint(fee_tier).take(), block);
    auto pool = decode_or_none(data, [](const Bytes& d) { return abi::address_at(d, 0); });
    if (!pool || pool->is_zero()) return std::nullopt;
    return pool;
}

}  // namespace contract

}  // namespace mev
