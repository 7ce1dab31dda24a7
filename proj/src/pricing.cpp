#include "mev/pricing.hpp"

#include <algorithm>
#include <tuple>

#include "mev/errors.hpp"

namespace mev {

std::optional<Rational> spot_price_v2(const U256& reserve0, const U256& reserve1, unsigned decimals0,
                                      unsigned decimals1) {
    if (reserve0 == 0 || reserve1 == 0) return std::nullopt;
    // (reserve0 / 10^d0) / (reserve1 / 10^d1)
    return Rational(BigInt(reserve0) * pow10(decimals1), BigInt(reserve1) * pow10(decimals0));
}

std::optional<Rational> spot_price_v3(const U256& sqrt_price_x96, unsigned decimals0, unsigned decimals1) {
    if (sqrt_price_x96 == 0) return std::nullopt;
    // raw token0 price in token1 = sqrtP^2 / 2^192; invert and rescale to human units.
    const BigInt sq = BigInt(sqrt_price_x96) * BigInt(sqrt_price_x96);
    return Rational((BigInt(1) << 192) * pow10(decimals1), sq * pow10(decimals0));
}

std::string_view to_string(PriceRoute r) {
    switch (r) {
        case PriceRoute::direct_usdc: return "direct_usdc";
        case PriceRoute::via_native: return "via_native";
        case PriceRoute::unpriced: return "unpriced";
    }
    return "unpriced";
}

PriceRoute price_route_from_string(std::string_view s) {
    if (s == "direct_usdc") return PriceRoute::direct_usdc;
    if (s == "via_native") return PriceRoute::via_native;
    if (s == "unpriced") return PriceRoute::unpriced;
    throw std::invalid_argument("unknown price route: " + std::string(s));
}

std::string_view to_string(FindingKind k) {
    switch (k) {
        case FindingKind::arbitrage: return "arbitrage";
        case FindingKind::sandwich: return "sandwich";
        case FindingKind::liquidation: return "liquidation";
    }
    return "arbitrage";
}

FindingKind finding_kind_from_string(std::string_view s) {
    if (s == "arbitrage") return FindingKind::arbitrage;
    if (s == "sandwich") return FindingKind::sandwich;
    if (s == "liquidation") return FindingKind::liquidation;
    throw std::invalid_argument("unknown finding kind: " + std::string(s));
}

PriceOracle::PriceOracle(const ChainConfig& cfg, StateReader& reader) : cfg_(cfg), reader_(reader) {}

std::optional<unsigned> PriceOracle::token_decimals(const Address& token, std::uint64_t block) {
    {
        std::lock_guard lock(mutex_);
        if (auto it = decimals_cache_.find(token); it != decimals_cache_.end()) return it->second;
    }
    auto d = contract::decimals(reader_, token, block);
    if (d && *d > 36) d.reset();
    if (d) {
        std::lock_guard lock(mutex_);
        decimals_cache_[token] = d;
    }
    return d;
}

std::optional<PoolQuote> PriceOracle::find_pool(const Address& token, const Address& quote, std::uint64_t block) {
    if (token == quote) return std::nullopt;
    const Address token0 = std::min(token, quote);
    const Address token1 = std::max(token, quote);

    auto lookup = [&](const DexFactory& factory, std::uint32_t fee) -> std::optional<Address> {
        const auto key = std::make_tuple(token, quote, factory.address, fee);
        {
            std::lock_guard lock(mutex_);
            if (auto it = pool_cache_.find(key); it != pool_cache_.end()) return it->second;
        }
        auto pool = factory.family == PoolFamily::v2
                        ? contract::get_pair(reader_, factory.address, token, quote, block)
                        : contract::get_pool(reader_, factory.address, token, quote, fee, block);
        if (pool) {
            std::lock_guard lock(mutex_);
            pool_cache_.emplace(key, *pool);
        }
        return pool;
    };

    std::optional<PoolQuote> best;
    auto consider = [&](PoolQuote q) {
        if (q.liquidity <= 0) return;
        if (!best || q.liquidity > best->liquidity || (q.liquidity == best->liquidity && q.fee_tier < best->fee_tier)) {
            best = std::move(q);
        }
    };

    for (const auto& factory : cfg_.dex_factories) {
        if (factory.family == PoolFamily::v2) {
            auto pair = lookup(factory, 0);
            if (!pair) continue;
            auto reserves = contract::get_reserves(reader_, *pair, block);
            if (!reserves) continue;
            const BigInt k = BigInt(reserves->reserve0) * BigInt(reserves->reserve1);
            consider({*pair, PoolFamily::v2, 3000, token0, token1, boost::multiprecision::sqrt(k)});
        } else {
            for (auto fee : factory.fee_tiers) {
                auto pool = lookup(factory, fee);
                if (!pool) continue;
                auto liq = contract::liquidity(reader_, *pool, block);
                if (!liq) continue;
                consider({*pool, PoolFamily::v3, fee, token0, token1, BigInt(*liq)});
            }
        }
    }
    return best;
}

std::optional<Rational> PriceOracle::price_in(const PoolQuote& pool, const Address& token, std::uint64_t block) {
    const auto d0 = token_decimals(pool.token0, block);
    const auto d1 = token_decimals(pool.token1, block);
    if (!d0 || !d1) return std::nullopt;

    std::optional<Rational> token1_in_token0;
    if (pool.family == PoolFamily::v2) {
        auto r = contract::get_reserves(reader_, pool.pool, block);
        if (r) token1_in_token0 = spot_price_v2(r->reserve0, r->reserve1, *d0, *d1);
    } else {
        auto s = contract::slot0(reader_, pool.pool, block);
        if (s) token1_in_token0 = spot_price_v3(s->sqrt_price_x96, *d0, *d1);
    }
    if (!token1_in_token0) return std::nullopt;
    if (token == pool.token1) return token1_in_token0;
    return Rational(1) / *token1_in_token0;
}

TokenPrice PriceOracle::price_token_usd(const Address& token, std::uint64_t block) {
    {
        std::lock_guard lock(mutex_);
        if (auto it = price_cache_.find({token, block}); it != price_cache_.end()) return it->second;
    }
    TokenPrice price;
    price.token = token;
    price.block_number = block;

    if (token == cfg_.usdc_token) {
        price.usd_price = Rational(1);
        price.route = PriceRoute::direct_usdc;
    } else if (auto direct = find_usdc_pool(token, block); direct && (price.usd_price = price_in(*direct, token, block))) {
        price.route = PriceRoute::direct_usdc;
        price.source_pools = {direct->pool};
    } else if (cfg_.native_hop_pricing && token != cfg_.native_wrapped_token) {
        auto hop = find_pool(token, cfg_.native_wrapped_token, block);
        auto native = find_usdc_pool(cfg_.native_wrapped_token, block);
        if (hop && native) {
            auto in_native = price_in(*hop, token, block);
            auto native_usd = price_in(*native, cfg_.native_wrapped_token, block);
            if (in_native && native_usd) {
                price.usd_price = *in_native * *native_usd;
                price.route = PriceRoute::via_native;
                price.source_pools = {hop->pool, native->pool};
            }
        }
    }
    if (!price.usd_price) price.route = PriceRoute::unpriced;

    std::lock_guard lock(mutex_);
    price_cache_.emplace(std::make_pair(token, block), price);
    return price;
}

std::optional<Fixed6> PriceOracle::usd_value(const I256& raw, const Address& token, const TokenPrice& price,
                                             std::uint64_t block) {
    if (!price.usd_price) return std::nullopt;
    const auto dec = token_decimals(token, block);
    if (!dec) return std::nullopt;
    return Fixed6::from_rational(Rational(BigInt(raw)) * *price.usd_price / pow10(*dec));
}

namespace {

// Worse of two routes: unpriced > via_native > direct_usdc.
PriceRoute combine(PriceRoute a, PriceRoute b) {
    auto rank = [](PriceRoute r) { return r == PriceRoute::direct_usdc ? 0 : r == PriceRoute::via_native ? 1 : 2; };
    return rank(a) >= rank(b) ? a : b;
}

}  // namespace

std::vector<PricedMevRecord> PriceOracle::price_findings(const MevFindings& findings) {
    struct Pending {
        std::uint64_t first_log;
        PricedMevRecord record;
    };
    std::vector<Pending> pending;
    const std::uint64_t block = findings.block_number;

    auto base = [&](FindingKind kind, const Hash32& tx, std::uint64_t tx_index) {
        PricedMevRecord r;
        r.kind = kind;
        r.block_number = block;
        r.timestamp = findings.timestamp;
        r.day = utc_day(findings.timestamp);
        r.tx_hash = tx;
        r.tx_index = tx_index;
        return r;
    };

    for (const auto& arb : findings.arbitrages) {
        auto r = base(FindingKind::arbitrage, arb.tx_hash, arb.tx_index);
        r.profit_token = arb.profit_token;
        r.profit_raw = arb.profit_raw;
        r.path_length = static_cast<std::uint32_t>(arb.path.size());
        const TokenPrice p = price_token_usd(arb.profit_token, block);
        r.usd_profit = usd_value(arb.profit_raw, arb.profit_token, p, block);
        r.route = r.usd_profit ? p.route : PriceRoute::unpriced;
        pending.push_back({arb.path.front().log_index, std::move(r)});
    }
    for (const auto& sw : findings.sandwiches) {
        auto r = base(FindingKind::sandwich, sw.backrun.tx_hash, sw.backrun.tx_index);
        r.profit_token = sw.profit_token;
        r.profit_raw = sw.profit_raw;
        r.path_length = static_cast<std::uint32_t>(2 + sw.victims.size());
        const TokenPrice p = price_token_usd(sw.profit_token, block);
        r.usd_profit = usd_value(sw.profit_raw, sw.profit_token, p, block);
        r.route = r.usd_profit ? p.route : PriceRoute::unpriced;
        pending.push_back({sw.backrun.log_index, std::move(r)});
    }
    for (const auto& liq : findings.liquidations) {
        auto r = base(FindingKind::liquidation, liq.tx_hash, liq.tx_index);
        r.profit_token = liq.collateral_token;
        r.profit_raw = I256(liq.collateral_seized);
        const TokenPrice pc = price_token_usd(liq.collateral_token, block);
        const TokenPrice pd = price_token_usd(liq.debt_token, block);
        auto seized = usd_value(I256(liq.collateral_seized), liq.collateral_token, pc, block);
        auto repaid = usd_value(I256(liq.debt_repaid), liq.debt_token, pd, block);
        if (seized && repaid) {
            // Exact difference first, one rounding at the end.
            const auto dc = token_decimals(liq.collateral_token, block);
            const auto dd = token_decimals(liq.debt_token, block);
            const Rational value = Rational(BigInt(liq.collateral_seized)) * *pc.usd_price / pow10(*dc) -
                                   Rational(BigInt(liq.debt_repaid)) * *pd.usd_price / pow10(*dd);
            r.usd_profit = Fixed6::from_rational(value);
            r.route = combine(pc.route, pd.route);
        }
        pending.push_back({liq.log_index, std::move(r)});
    }

    auto kind_rank = [](FindingKind k) { return static_cast<int>(k); };
    std::stable_sort(pending.begin(), pending.end(), [&](const Pending& a, const Pending& b) {
        return std::make_tuple(a.record.tx_index, kind_rank(a.record.kind), a.first_log) <
               std::make_tuple(b.record.tx_index, kind_rank(b.record.kind), b.first_log);
    });

    std::vector<PricedMevRecord> out;
    std::map<Hash32, std::uint32_t> next_ordinal;
    for (auto& p : pending) {
        p.record.ordinal = next_ordinal[p.record.tx_hash]++;
        out.push_back(std::move(p.record));
    }
    return out;
}

}  // namespace mev
