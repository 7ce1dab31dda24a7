#include "mev/simulated_node.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <thread>

#include "mev/abi.hpp"
#include "mev/ingestion.hpp"
#include "mev/keccak.hpp"
#include "mev/state_reader.hpp"

namespace mev {

const PoolStatePoint* SimPool::state_at(std::uint64_t block) const {
    const PoolStatePoint* current = nullptr;
    for (const auto& p : history) {
        if (p.block > block) break;
        current = &p;
    }
    return current;
}

// ----- state file

json chain_state_to_json(const ChainState& state) {
    json tokens = json::array();
    for (const auto& t : state.tokens) {
        tokens.push_back({{"address", t.address.hex()}, {"decimals", t.decimals}, {"symbol", t.symbol}});
    }
    json pools = json::array();
    for (const auto& p : state.pools) {
        json history = json::array();
        for (const auto& h : p.history) {
            if (p.family == PoolFamily::v2) {
                history.push_back({{"block", h.block}, {"reserve0", to_dec(h.reserve0)}, {"reserve1", to_dec(h.reserve1)}});
            } else {
                history.push_back({{"block", h.block},
                                   {"sqrt_price_x96", to_dec(h.sqrt_price_x96)},
                                   {"liquidity", to_dec(h.liquidity)}});
            }
        }
        json pool = {{"address", p.address.hex()},
                     {"factory", p.factory.hex()},
                     {"family", to_string(p.family)},
                     {"token0", p.token0.hex()},
                     {"token1", p.token1.hex()},
                     {"history", std::move(history)}};
        if (p.family == PoolFamily::v3) pool["fee"] = p.fee;
        pools.push_back(std::move(pool));
    }
    return {{"format", kStateFormat}, {"version", 1}, {"chain_id", state.chain_id}, {"tokens", tokens}, {"pools", pools}};
}

ChainState chain_state_from_json(const json& j) {
    if (j.value("format", "") != kStateFormat) throw ConfigError("not a chain state file");
    if (j.value("version", 0) != 1) throw ConfigError("unsupported chain state version");
    ChainState s;
    s.chain_id = j.at("chain_id").get<std::uint64_t>();
    for (const auto& t : j.at("tokens")) {
        s.tokens.push_back({Address::from_hex(t.at("address").get<std::string>()), t.at("decimals").get<unsigned>(),
                            t.value("symbol", std::string{})});
    }
    for (const auto& p : j.at("pools")) {
        SimPool pool;
        pool.address = Address::from_hex(p.at("address").get<std::string>());
        pool.factory = Address::from_hex(p.at("factory").get<std::string>());
        pool.family = pool_family_from_string(p.at("family").get<std::string>());
        pool.fee = p.value("fee", 0u);
        pool.token0 = Address::from_hex(p.at("token0").get<std::string>());
        pool.token1 = Address::from_hex(p.at("token1").get<std::string>());
        for (const auto& h : p.at("history")) {
            PoolStatePoint pt;
            pt.block = h.at("block").get<std::uint64_t>();
            if (pool.family == PoolFamily::v2) {
                pt.reserve0 = u256_from_dec(h.at("reserve0").get<std::string>());
                pt.reserve1 = u256_from_dec(h.at("reserve1").get<std::string>());
            } else {
                pt.sqrt_price_x96 = u256_from_dec(h.at("sqrt_price_x96").get<std::string>());
                pt.liquidity = u256_from_dec(h.at("liquidity").get<std::string>());
            }
            pool.history.push_back(pt);
        }
        std::sort(pool.history.begin(), pool.history.end(),
                  [](const PoolStatePoint& a, const PoolStatePoint& b) { return a.block < b.block; });
        s.pools.push_back(std::move(pool));
    }
    return s;
}

void write_chain_state(const ChainState& state, const std::filesystem::path& path, const std::string& blocks_fixture) {
    json j = chain_state_to_json(state);
    if (!blocks_fixture.empty()) j["blocks_fixture"] = blocks_fixture;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write chain state " + path.string());
    out << j.dump(1) << '\n';
}

ChainFixture load_chain_fixture(const std::filesystem::path& state_path) {
    std::ifstream in(state_path, std::ios::binary);
    if (!in) throw ConfigError("cannot open chain state " + state_path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("invalid chain state " + state_path.string() + ": " + e.what());
    }
    ChainFixture fx;
    fx.state = chain_state_from_json(j);
    if (auto blocks = j.find("blocks_fixture"); blocks != j.end()) {
        fx.blocks = load_fixture(state_path.parent_path() / blocks->get<std::string>()).blocks;
    }
    return fx;
}

// ----- node

namespace {

json rpc_error(const json& id, int code, const std::string& message) {
    return {{"jsonrpc", "2.0"}, {"id", id}, {"error", {{"code", code}, {"message", message}}}};
}

struct Reverted {};

std::string words(std::initializer_list<abi::Word> ws) {
    Bytes out;
    for (const auto& w : ws) out.insert(out.end(), w.begin(), w.end());
    return to_hex(out);
}

bool selector_is(const Bytes& data, std::string_view signature) {
    const auto sel = function_selector(signature);
    return data.size() >= 4 && std::equal(sel.begin(), sel.end(), data.begin());
}

}  // namespace

SimulatedNode::SimulatedNode(ChainFixture fixture) : state_(std::move(fixture.state)) {
    for (auto& b : fixture.blocks) {
        for (std::size_t i = 0; i < b.transactions.size(); ++i) tx_locator_[b.transactions[i].hash] = {b.number, i};
        blocks_.emplace(b.number, std::move(b));
    }
    for (const auto& p : state_.pools) pools_[p.address] = &p;
    for (const auto& t : state_.tokens) tokens_[t.address] = &t;
}

void SimulatedNode::set_fault_injector(std::function<bool(const json&)> injector) {
    std::lock_guard lock(mutex_);
    fault_injector_ = std::move(injector);
}

std::uint64_t SimulatedNode::requests(const std::string& method) const {
    std::lock_guard lock(mutex_);
    auto it = per_method_.find(method);
    return it == per_method_.end() ? 0 : it->second;
}

std::uint64_t SimulatedNode::head() const { return blocks_.empty() ? 0 : blocks_.rbegin()->first; }

json SimulatedNode::send(const json& request) {
    const std::string method = request.value("method", std::string{});
    const json id = request.value("id", json(nullptr));
    std::function<bool(const json&)> injector;
    {
        std::lock_guard lock(mutex_);
        ++per_method_[method];
        injector = fault_injector_;
    }
    ++total_;
    if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
    if (injector && injector(request)) throw RpcError("injected transport failure");

    try {
        return {{"jsonrpc", "2.0"}, {"id", id}, {"result", dispatch(method, request.value("params", json::array()))}};
    } catch (const Reverted&) {
        return rpc_error(id, kExecutionReverted, "execution reverted");
    } catch (const RpcResponseError& e) {
        return rpc_error(id, e.code(), e.what());
    } catch (const std::exception& e) {
        return rpc_error(id, -32602, std::string("invalid params: ") + e.what());
    }
}

const BlockData* SimulatedNode::block_by_tag(const json& tag) const {
    const std::string t = tag.get<std::string>();
    const std::uint64_t n = t == "latest" ? head() : u64_from_quantity(t);
    auto it = blocks_.find(n);
    return it == blocks_.end() ? nullptr : &it->second;
}

json SimulatedNode::dispatch(const std::string& method, const json& params) {
    if (method == "eth_chainId") return u64_to_quantity(state_.chain_id);
    if (method == "eth_blockNumber") return u64_to_quantity(head());
    if (method == "eth_getBlockByNumber") {
        const BlockData* b = block_by_tag(params.at(0));
        return b ? block_json(*b) : json(nullptr);
    }
    if (method == "eth_getBlockReceipts") {
        if (!block_receipts_supported_) throw RpcResponseError(kMethodNotFound, "the method eth_getBlockReceipts does not exist");
        const BlockData* b = block_by_tag(params.at(0));
        return b ? receipts_json(*b) : json(nullptr);
    }
    if (method == "eth_getTransactionReceipt") {
        auto it = tx_locator_.find(Hash32::from_hex(params.at(0).get<std::string>()));
        if (it == tx_locator_.end()) return nullptr;
        return receipts_json(blocks_.at(it->second.first)).at(it->second.second);
    }
    if (method == "eth_call") return eth_call(params);
    throw RpcResponseError(kMethodNotFound, "the method " + method + " does not exist");
}

json SimulatedNode::block_json(const BlockData& b) const {
    json txs = json::array();
    for (const auto& tx : b.transactions) {
        txs.push_back({{"hash", tx.hash.hex()},
                       {"transactionIndex", u64_to_quantity(tx.index)},
                       {"blockNumber", u64_to_quantity(b.number)},
                       {"from", tx.sender.hex()},
                       {"to", tx.recipient ? json(tx.recipient->hex()) : json(nullptr)}});
    }
    return {{"number", u64_to_quantity(b.number)},
            {"hash", hash_from_u64(b.number).hex()},
            {"timestamp", u64_to_quantity(b.timestamp)},
            {"transactions", std::move(txs)}};
}

json SimulatedNode::receipts_json(const BlockData& b) const {
    json out = json::array();
    for (const auto& tx : b.transactions) {
        json logs = json::array();
        for (const auto& log : tx.logs) {
            json topics = json::array();
            for (const auto& t : log.topics) topics.push_back(t.hex());
            logs.push_back({{"address", log.address.hex()},
                            {"topics", std::move(topics)},
                            {"data", to_hex(log.data)},
                            {"logIndex", u64_to_quantity(log.log_index)},
                            {"blockNumber", u64_to_quantity(b.number)},
                            {"transactionHash", tx.hash.hex()}});
        }
        out.push_back({{"transactionHash", tx.hash.hex()},
                       {"transactionIndex", u64_to_quantity(tx.index)},
                       {"blockNumber", u64_to_quantity(b.number)},
                       {"status", tx.status == TxStatus::success ? "0x1" : "0x0"},
                       {"gasUsed", u64_to_quantity(tx.gas_used)},
                       {"logs", std::move(logs)}});
    }
    return out;
}

json SimulatedNode::eth_call(const json& params) {
    const json& call = params.at(0);
    const Address to = Address::from_hex(call.at("to").get<std::string>());
    const Bytes data = from_hex(call.value("data", call.value("input", std::string("0x"))));
    const std::string tag = params.size() > 1 ? params.at(1).get<std::string>() : "latest";
    const std::uint64_t block = tag == "latest" ? head() : u64_from_quantity(tag);
    const ByteView args = data.size() >= 4 ? ByteView(data).subspan(4) : ByteView{};

    if (auto t = tokens_.find(to); t != tokens_.end()) {
        if (selector_is(data, signatures::kDecimals)) return words({abi::word_from_uint(t->second->decimals)});
        throw Reverted{};
    }
    if (auto p = pools_.find(to); p != pools_.end()) {
        const SimPool& pool = *p->second;
        const PoolStatePoint* st = pool.state_at(block);
        if (!st) return "0x";  // not deployed yet
        if (selector_is(data, signatures::kToken0)) return words({abi::word_from_address(pool.token0)});
        if (selector_is(data, signatures::kToken1)) return words({abi::word_from_address(pool.token1)});
        if (pool.family == PoolFamily::v2 && selector_is(data, signatures::kGetReserves)) {
            return words({abi::word_from_uint(st->reserve0), abi::word_from_uint(st->reserve1), abi::word_from_uint(0)});
        }
        if (pool.family == PoolFamily::v3) {
            if (selector_is(data, signatures::kFee)) return words({abi::word_from_uint(pool.fee)});
            if (selector_is(data, signatures::kLiquidity)) return words({abi::word_from_uint(st->liquidity)});
            if (selector_is(data, signatures::kSlot0)) {
                const abi::Word zero = abi::word_from_uint(0);
                return words({abi::word_from_uint(st->sqrt_price_x96), zero, zero, zero, zero, zero,
                              abi::word_from_uint(1)});
            }
        }
        throw Reverted{};
    }

    const bool is_factory = std::any_of(state_.pools.begin(), state_.pools.end(),
                                        [&](const SimPool& p) { return p.factory == to; });
    if (!is_factory) return "0x";
    const bool get_pair = selector_is(data, signatures::kGetPair);
    const bool get_pool = selector_is(data, signatures::kGetPool);
    if (!get_pair && !get_pool) throw Reverted{};
    const Address a = abi::address_at(args, 0);
    const Address b = abi::address_at(args, 1);
    const std::uint32_t fee = get_pool ? static_cast<std::uint32_t>(abi::uint_at(args, 2)) : 0;
    for (const auto& pool : state_.pools) {
        if (pool.factory != to || (pool.family == PoolFamily::v2) != get_pair) continue;
        if (get_pool && pool.fee != fee) continue;
        const bool same_pair = (pool.token0 == a && pool.token1 == b) || (pool.token0 == b && pool.token1 == a);
        if (same_pair && pool.state_at(block)) return words({abi::word_from_address(pool.address)});
    }
    return words({abi::word_from_address(Address{})});
}

}  // namespace mev
