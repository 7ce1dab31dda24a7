#include "mev/decoder.hpp"

#include <fstream>
#include <sstream>

#include "mev/abi.hpp"
#include "mev/errors.hpp"
#include "mev/keccak.hpp"

namespace mev {

const char* const kDefaultRegistryText = R"(# signature                                                           family      kind
Swap(address,uint256,uint256,uint256,uint256,address)                 uniswap_v2  swap_v2
Swap(address,address,int256,int256,uint160,uint128,int24)             uniswap_v3  swap_v3
LiquidationCall(address,address,address,uint256,uint256,address,bool) aave_v2     liquidation_aave
LiquidateBorrow(address,address,uint256,address,uint256)              compound    liquidation_compound
)";

std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::swap_v2: return "swap_v2";
        case EventKind::swap_v3: return "swap_v3";
        case EventKind::liquidation_aave: return "liquidation_aave";
        case EventKind::liquidation_compound: return "liquidation_compound";
    }
    return "unknown";
}

std::optional<EventKind> event_kind_from_string(std::string_view s) {
    for (auto k : {EventKind::swap_v2, EventKind::swap_v3, EventKind::liquidation_aave, EventKind::liquidation_compound}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

// ----- registry

EventRegistry EventRegistry::with_defaults() {
    EventRegistry r;
    r.add_entries(parse_entries(kDefaultRegistryText, "<default registry>"));
    return r;
}

std::vector<RegistryEntry> EventRegistry::parse_entries(std::string_view text, const std::string& source) {
    std::vector<RegistryEntry> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string signature, family, kind, extra;
        if (!(fields >> signature)) continue;
        if (!(fields >> family >> kind) || (fields >> extra)) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'signature family kind'");
        }
        if (signature.find('(') == std::string::npos || signature.back() != ')') {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": not a canonical event signature: " + signature);
        }
        auto k = event_kind_from_string(kind);
        if (!k) throw ConfigError(source + ":" + std::to_string(line_no) + ": unknown event kind '" + kind + "'");
        out.push_back({topic_for_signature(signature), family, *k, signature});
    }
    return out;
}

void EventRegistry::add(std::string signature, std::string family, EventKind kind) {
    const Hash32 topic = topic_for_signature(signature);
    if (by_topic_.contains(topic)) {
        throw ConfigError("duplicate event topic " + topic.hex() + " for " + signature);
    }
    by_topic_.emplace(topic, entries_.size());
    entries_.push_back({topic, std::move(family), kind, std::move(signature)});
}

void EventRegistry::add_entries(const std::vector<RegistryEntry>& entries) {
    for (const auto& e : entries) add(e.signature, e.family, e.kind);
}

void EventRegistry::load_extension(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open registry extension " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    add_entries(parse_entries(ss.str(), path.string()));
}

const RegistryEntry* EventRegistry::find(const Hash32& topic) const {
    auto it = by_topic_.find(topic);
    return it == by_topic_.end() ? nullptr : &entries_[it->second];
}

bool EventRegistry::verify() const {
    for (const auto& e : entries_) {
        if (topic_for_signature(e.signature) != e.topic) return false;
    }
    return by_topic_.size() == entries_.size();
}

DecodeDiagnostics& DecodeDiagnostics::operator+=(const DecodeDiagnostics& o) {
    total_logs += o.total_logs;
    decoded += o.decoded;
    ignored_unregistered += o.ignored_unregistered;
    malformed += o.malformed;
    unresolved_pool_swaps += o.unresolved_pool_swaps;
    reverted_transactions += o.reverted_transactions;
    return *this;
}

// ----- decoders

namespace {

Address topic_address(const LogRecord& log, std::size_t i) {
    abi::Word w;
    std::copy(log.topics[i].bytes.begin(), log.topics[i].bytes.end(), w.begin());
    return abi::address_from_word(w);
}

SwapEvent swap_base(const LogRecord& log, const PoolMetadata& meta) {
    SwapEvent s;
    s.log_index = log.log_index;
    s.pool = meta.pool;
    if (log.topics.size() > 1) s.initiator = topic_address(log, 1);
    if (log.topics.size() > 2) s.recipient = topic_address(log, 2);
    return s;
}

void orient(SwapEvent& s, const PoolMetadata& meta, bool token0_in, U256 in, U256 out) {
    s.token_in = token0_in ? meta.token0 : meta.token1;
    s.token_out = token0_in ? meta.token1 : meta.token0;
    s.amount_in = std::move(in);
    s.amount_out = std::move(out);
}

}  // namespace

SwapEvent decode_v2_swap(const LogRecord& log, const PoolMetadata& meta) {
    if (meta.family != PoolFamily::v2) throw DecodeError("v2 swap from a pool resolved as " + std::string(to_string(meta.family)));
    const U256 in0 = abi::uint_at(log.data, 0);
    const U256 in1 = abi::uint_at(log.data, 1);
    const U256 out0 = abi::uint_at(log.data, 2);
    const U256 out1 = abi::uint_at(log.data, 3);

    if (in0 != 0 && in1 != 0) throw MalformedSwap("v2 swap with inflow of both tokens");
    // Net each token's flow; fee-on-transfer forks report both sides of one token.
    const I256 net0 = signed_diff(in0, out0);
    const I256 net1 = signed_diff(in1, out1);

    SwapEvent s = swap_base(log, meta);
    if (net0 > 0 && net1 < 0) {
        orient(s, meta, true, U256(net0), U256(-net1));
    } else if (net1 > 0 && net0 < 0) {
        orient(s, meta, false, U256(net1), U256(-net0));
    } else {
        throw MalformedSwap("v2 swap amounts do not describe a single direction");
    }
    return s;
}

SwapEvent decode_v3_swap(const LogRecord& log, const PoolMetadata& meta) {
    if (meta.family != PoolFamily::v3) throw DecodeError("v3 swap from a pool resolved as " + std::string(to_string(meta.family)));
    if (abi::word_count(log.data) < 5) throw DecodeError("v3 swap data shorter than 5 words");
    const auto a0 = abi::int_at(log.data, 0);
    const auto a1 = abi::int_at(log.data, 1);
    if (a0.magnitude == 0 || a1.magnitude == 0) throw MalformedSwap("v3 swap with a zero amount");
    if (a0.negative == a1.negative) throw MalformedSwap("v3 swap amounts share a sign");

    SwapEvent s = swap_base(log, meta);
    // Positive amounts flowed into the pool.
    if (!a0.negative) {
        orient(s, meta, true, a0.magnitude, a1.magnitude);
    } else {
        orient(s, meta, false, a1.magnitude, a0.magnitude);
    }
    return s;
}

LiquidationEvent decode_liquidation(const LogRecord& log, EventKind kind, std::string protocol) {
    LiquidationEvent ev;
    ev.log_index = log.log_index;
    ev.protocol = std::move(protocol);
    switch (kind) {
        case EventKind::liquidation_aave:
            // LiquidationCall(collateralAsset indexed, debtAsset indexed, user indexed,
            //                 debtToCover, liquidatedCollateralAmount, liquidator, receiveAToken)
            if (log.topics.size() != 4) throw DecodeError("aave LiquidationCall expects 4 topics");
            if (abi::word_count(log.data) != 4) throw DecodeError("aave LiquidationCall expects 4 data words");
            ev.collateral_token = topic_address(log, 1);
            ev.debt_token = topic_address(log, 2);
            ev.borrower = topic_address(log, 3);
            ev.debt_repaid = abi::uint_at(log.data, 0);
            ev.collateral_seized = abi::uint_at(log.data, 1);
            ev.liquidator = abi::address_at(log.data, 2);
            abi::bool_at(log.data, 3);
            break;
        case EventKind::liquidation_compound:
            // LiquidateBorrow(liquidator, borrower, repayAmount, cTokenCollateral, seizeTokens),
            // emitted by the borrowed market.
            if (log.topics.size() != 1) throw DecodeError("compound LiquidateBorrow expects 1 topic");
            if (abi::word_count(log.data) != 5) throw DecodeError("compound LiquidateBorrow expects 5 data words");
            ev.liquidator = abi::address_at(log.data, 0);
            ev.borrower = abi::address_at(log.data, 1);
            ev.debt_repaid = abi::uint_at(log.data, 2);
            ev.collateral_token = abi::address_at(log.data, 3);
            ev.collateral_seized = abi::uint_at(log.data, 4);
            ev.debt_token = log.address;
            break;
        default:
            throw DecodeError("not a liquidation event kind: " + std::string(to_string(kind)));
    }
    if (ev.debt_repaid == 0) throw DecodeError("liquidation with zero debt repaid");
    if (ev.collateral_seized == 0) throw DecodeError("liquidation with zero collateral seized");
    return ev;
}

LiquidationEvent decode_liquidation(const LogRecord& log, const EventRegistry& registry) {
    if (log.topics.empty()) throw DecodeError("log without topics");
    const RegistryEntry* entry = registry.find(log.topics[0]);
    if (!entry) throw DecodeError("topic " + log.topics[0].hex() + " is not registered");
    return decode_liquidation(log, entry->kind, entry->family);
}

ClassifiedBlock classify_block(const BlockData& block, const EventRegistry& registry, PoolMetadataSource& metadata) {
    ClassifiedBlock out;
    out.block_number = block.number;
    out.timestamp = block.timestamp;
    out.transactions.reserve(block.transactions.size());
    auto& diag = out.diagnostics;

    for (const auto& tx : block.transactions) {
        TxEvents group;
        group.tx_hash = tx.hash;
        group.index = tx.index;
        group.initiator = tx.sender;
        if (tx.status == TxStatus::reverted) ++diag.reverted_transactions;

        for (const auto& log : tx.logs) {
            ++diag.total_logs;
            const RegistryEntry* entry = log.topics.empty() ? nullptr : registry.find(log.topics[0]);
            if (!entry) {
                ++diag.ignored_unregistered;
                continue;
            }
            try {
                if (entry->kind == EventKind::swap_v2 || entry->kind == EventKind::swap_v3) {
                    const PoolFamily family = entry->kind == EventKind::swap_v2 ? PoolFamily::v2 : PoolFamily::v3;
                    const auto meta = metadata.resolve(log.address, family, block.number);
                    if (!meta) {
                        ++diag.unresolved_pool_swaps;
                        continue;
                    }
                    SwapEvent s = family == PoolFamily::v2 ? decode_v2_swap(log, *meta) : decode_v3_swap(log, *meta);
                    s.tx_hash = tx.hash;
                    s.block_number = block.number;
                    s.tx_index = tx.index;
                    s.initiator = tx.sender;
                    group.swaps.push_back(std::move(s));
                } else {
                    LiquidationEvent ev = decode_liquidation(log, entry->kind, entry->family);
                    ev.tx_hash = tx.hash;
                    ev.block_number = block.number;
                    ev.tx_index = tx.index;
                    group.liquidations.push_back(std::move(ev));
                }
                ++diag.decoded;
            } catch (const DecodeError&) {
                ++diag.malformed;
            }
        }
        out.transactions.push_back(std::move(group));
    }
    return out;
}

}  // namespace mev
