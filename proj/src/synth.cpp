#include "mev/synth.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include "mev/abi.hpp"
#include "mev/ingestion.hpp"
#include "mev/keccak.hpp"

namespace mev::synth {

// ----- builders

Address labeled_address(std::string_view label) {
    const Hash32 h = keccak256(label);
    Address a;
    std::copy(h.bytes.begin() + 12, h.bytes.end(), a.bytes.begin());
    return a;
}

Hash32 labeled_hash(std::string_view label) { return keccak256(label); }

namespace {

Hash32 topic_of_address(const Address& a) {
    Hash32 t;
    std::copy(a.bytes.begin(), a.bytes.end(), t.bytes.begin() + 12);
    return t;
}

Bytes concat(std::initializer_list<abi::Word> words) {
    Bytes out;
    for (const auto& w : words) out.insert(out.end(), w.begin(), w.end());
    return out;
}

}  // namespace

LogRecord v2_swap_log(const Address& pool, const U256& amount0_in, const U256& amount1_in, const U256& amount0_out,
                      const U256& amount1_out, const Address& sender, const Address& recipient) {
    LogRecord log;
    log.address = pool;
    log.topics = {topic_for_signature("Swap(address,uint256,uint256,uint256,uint256,address)"), topic_of_address(sender),
                  topic_of_address(recipient)};
    log.data = concat({abi::word_from_uint(amount0_in), abi::word_from_uint(amount1_in), abi::word_from_uint(amount0_out),
                       abi::word_from_uint(amount1_out)});
    return log;
}

LogRecord v3_swap_log(const Address& pool, bool amount0_negative, const U256& amount0, bool amount1_negative,
                      const U256& amount1, const Address& sender, const Address& recipient) {
    LogRecord log;
    log.address = pool;
    log.topics = {topic_for_signature("Swap(address,address,int256,int256,uint160,uint128,int24)"),
                  topic_of_address(sender), topic_of_address(recipient)};
    log.data = concat({abi::word_from_int(amount0_negative, amount0), abi::word_from_int(amount1_negative, amount1),
                       abi::word_from_uint(U256(1) << 96), abi::word_from_uint(1'000'000), abi::word_from_int(false, 0)});
    return log;
}

LogRecord swap_log(const SimPool& pool, const Address& token_in, const U256& amount_in, const U256& amount_out,
                   const Address& sender, const Address& recipient) {
    const bool zero_in = token_in == pool.token0;
    if (!zero_in && token_in != pool.token1) throw PreconditionError("token is not in pool " + pool.address.hex());
    if (pool.family == PoolFamily::v2) {
        return zero_in ? v2_swap_log(pool.address, amount_in, 0, 0, amount_out, sender, recipient)
                       : v2_swap_log(pool.address, 0, amount_in, amount_out, 0, sender, recipient);
    }
    return zero_in ? v3_swap_log(pool.address, false, amount_in, true, amount_out, sender, recipient)
                   : v3_swap_log(pool.address, true, amount_out, false, amount_in, sender, recipient);
}

LogRecord aave_liquidation_log(const Address& lending_pool, const Address& collateral, const Address& debt,
                               const Address& borrower, const U256& debt_to_cover, const U256& collateral_seized,
                               const Address& liquidator) {
    LogRecord log;
    log.address = lending_pool;
    log.topics = {topic_for_signature("LiquidationCall(address,address,address,uint256,uint256,address,bool)"),
                  topic_of_address(collateral), topic_of_address(debt), topic_of_address(borrower)};
    log.data = concat({abi::word_from_uint(debt_to_cover), abi::word_from_uint(collateral_seized),
                       abi::word_from_address(liquidator), abi::word_from_uint(0)});
    return log;
}

LogRecord compound_liquidation_log(const Address& borrowed_market, const Address& liquidator, const Address& borrower,
                                   const U256& repay_amount, const Address& collateral_market, const U256& seize_tokens) {
    LogRecord log;
    log.address = borrowed_market;
    log.topics = {topic_for_signature("LiquidateBorrow(address,address,uint256,address,uint256)")};
    log.data = concat({abi::word_from_address(liquidator), abi::word_from_address(borrower),
                       abi::word_from_uint(repay_amount), abi::word_from_address(collateral_market),
                       abi::word_from_uint(seize_tokens)});
    return log;
}

LogRecord transfer_log(const Address& token, const Address& from, const Address& to, const U256& amount) {
    LogRecord log;
    log.address = token;
    log.topics = {topic_for_signature("Transfer(address,address,uint256)"), topic_of_address(from), topic_of_address(to)};
    log.data = concat({abi::word_from_uint(amount)});
    return log;
}

U256 sqrt_price_x96_for(const U256& raw0, const U256& raw1) {
    if (raw0 == 0) throw PreconditionError("zero reserve");
    const BigInt scaled = (BigInt(raw1) << 192) / BigInt(raw0);
    return U256(boost::multiprecision::sqrt(scaled));
}

// ----- manifest

namespace {

json hashes_json(const std::vector<Hash32>& hs) {
    json a = json::array();
    for (const auto& h : hs) a.push_back(h.hex());
    return a;
}

}  // namespace

json Manifest::to_json() const {
    json arbs = json::array();
    for (const auto& a : arbitrages) {
        arbs.push_back({{"block", a.block},
                        {"tx_hash", a.tx_hash.hex()},
                        {"log_indices", a.log_indices},
                        {"profit_token", a.profit_token.hex()},
                        {"profit_raw", to_dec(a.profit_raw)},
                        {"priced", a.priced}});
    }
    json sws = json::array();
    for (const auto& s : sandwiches) {
        sws.push_back({{"block", s.block},
                       {"frontrun_tx", s.frontrun_tx.hex()},
                       {"backrun_tx", s.backrun_tx.hex()},
                       {"victim_txs", hashes_json(s.victim_txs)},
                       {"profit_token", s.profit_token.hex()},
                       {"profit_raw", to_dec(s.profit_raw)}});
    }
    json liqs = json::array();
    for (const auto& l : liquidations) {
        liqs.push_back({{"block", l.block},
                        {"tx_hash", l.tx_hash.hex()},
                        {"log_index", l.log_index},
                        {"protocol", l.protocol},
                        {"priced", l.priced}});
    }
    json unpriced = json::array();
    for (const auto& t : unpriced_tokens) unpriced.push_back(t.hex());
    return {{"format", "mevinspect-manifest"},
            {"chain_id", chain_id},
            {"first_block", first_block},
            {"last_block", last_block},
            {"arbitrages", arbs},
            {"sandwiches", sws},
            {"liquidations", liqs},
            {"decoys",
             {{"malformed", decoys.malformed},
              {"unresolved", decoys.unresolved},
              {"unregistered", decoys.unregistered},
              {"reverted", decoys.reverted},
              {"near_miss_sandwiches", decoys.near_miss_sandwiches}}},
            {"unpriced_tokens", unpriced}};
}

Manifest Manifest::from_json(const json& j) {
    Manifest m;
    m.chain_id = j.at("chain_id").get<std::uint64_t>();
    m.first_block = j.at("first_block").get<std::uint64_t>();
    m.last_block = j.at("last_block").get<std::uint64_t>();
    for (const auto& a : j.at("arbitrages")) {
        m.arbitrages.push_back({a.at("block").get<std::uint64_t>(), Hash32::from_hex(a.at("tx_hash").get<std::string>()),
                                a.at("log_indices").get<std::vector<std::uint64_t>>(),
                                Address::from_hex(a.at("profit_token").get<std::string>()),
                                i256_from_dec(a.at("profit_raw").get<std::string>()), a.at("priced").get<bool>()});
    }
    for (const auto& s : j.at("sandwiches")) {
        PlantedSandwich p;
        p.block = s.at("block").get<std::uint64_t>();
        p.frontrun_tx = Hash32::from_hex(s.at("frontrun_tx").get<std::string>());
        p.backrun_tx = Hash32::from_hex(s.at("backrun_tx").get<std::string>());
        for (const auto& v : s.at("victim_txs")) p.victim_txs.push_back(Hash32::from_hex(v.get<std::string>()));
        p.profit_token = Address::from_hex(s.at("profit_token").get<std::string>());
        p.profit_raw = i256_from_dec(s.at("profit_raw").get<std::string>());
        m.sandwiches.push_back(std::move(p));
    }
    for (const auto& l : j.at("liquidations")) {
        m.liquidations.push_back({l.at("block").get<std::uint64_t>(), Hash32::from_hex(l.at("tx_hash").get<std::string>()),
                                  l.at("log_index").get<std::uint64_t>(), l.at("protocol").get<std::string>(),
                                  l.at("priced").get<bool>()});
    }
    const auto& d = j.at("decoys");
    m.decoys = {d.at("malformed").get<std::uint64_t>(), d.at("unresolved").get<std::uint64_t>(),
                d.at("unregistered").get<std::uint64_t>(), d.at("reverted").get<std::uint64_t>(),
                d.at("near_miss_sandwiches").get<std::uint64_t>()};
    for (const auto& t : j.at("unpriced_tokens")) m.unpriced_tokens.push_back(Address::from_hex(t.get<std::string>()));
    return m;
}

// ----- generator

namespace {

enum Tok { USDC, WNATIVE, WETH, TOKA, TOKB, TOKC, ORPHAN, CUSDC, CWETH, kTokenCount };

struct TokenSpec {
    const char* symbol;
    unsigned decimals;
    Rational usd[2];  // price before / from the mid-corpus epoch
};

const TokenSpec kTokens[kTokenCount] = {
    {"USDC", 6, {Rational(1), Rational(1)}},
    {"WNATIVE", 18, {Rational(3, 2), Rational(6, 5)}},
    {"WETH", 18, {Rational(3000), Rational(2800)}},
    {"TOKA", 24, {Rational(1, 4), Rational(1, 5)}},
    {"TOKB", 0, {Rational(40), Rational(40)}},
    {"TOKC", 8, {Rational(1, 500), Rational(1, 400)}},
    {"ORPHAN", 18, {Rational(2), Rational(2)}},
    {"cUSDC", 8, {Rational(1, 50), Rational(1, 50)}},
    {"cWETH", 8, {Rational(60), Rational(56)}},
};

struct PoolSpec {
    int factory;  // 0, 1: v2 factories; 2: v3 factory
    std::uint32_t fee;
    Tok a, b;
    long tvl_usd;  // per side
    bool sandwichable;
};

const PoolSpec kPools[] = {
    {0, 0, USDC, WNATIVE, 4'000'000, true},      {0, 0, WNATIVE, WETH, 3'000'000, true},
    {0, 0, WETH, USDC, 5'000'000, true},         {0, 0, WNATIVE, TOKA, 800'000, false},
    {0, 0, TOKA, WETH, 300'000, false},          {0, 0, USDC, TOKB, 200'000, false},
    {0, 0, TOKB, WETH, 100'000, false},          {0, 0, TOKC, WNATIVE, 50'000, false},
    {0, 0, ORPHAN, WETH, 200'000, false},        {1, 0, WNATIVE, WETH, 1'000'000, true},
    {1, 0, WETH, USDC, 2'000'000, true},         {1, 0, ORPHAN, WETH, 100'000, false},
    {1, 0, TOKA, WNATIVE, 200'000, false},       {1, 0, USDC, WNATIVE, 1'500'000, true},
    {2, 500, USDC, WETH, 9'000'000, true},       {2, 3000, WNATIVE, USDC, 2'000'000, true},
    {2, 3000, WETH, WNATIVE, 2'500'000, true},   {2, 3000, ORPHAN, WETH, 50'000, false},
    {2, 10000, TOKA, WETH, 100'000, false},      {2, 500, WNATIVE, USDC, 1'000'000, true},
};
constexpr std::size_t kPoolCount = std::size(kPools);

U256 floor_u256(const Rational& r) {
    if (r <= 0) return 0;
    return U256(BigInt(boost::multiprecision::numerator(r) / boost::multiprecision::denominator(r)));
}

struct Cycle {
    std::vector<std::size_t> pools;  // in hop order
    std::vector<Tok> tokens;         // tokens[i] flows into pools[i]; tokens.back() == tokens.front()
};

struct PlantRef {
    enum Kind { arbitrage, frontrun, victim, backrun, liquidation } kind;
    std::size_t index;
    std::vector<std::size_t> positions;  // log positions within the tx
};

struct TxSpec {
    Address sender;
    std::optional<Address> recipient;
    std::vector<LogRecord> logs;
    bool reverted = false;
    std::vector<PlantRef> plants;
};

using Unit = std::vector<TxSpec>;  // transactions that must keep their relative order

class Generator {
public:
    explicit Generator(const CorpusOptions& o) : o_(o), rng_(o.seed) {}

    Corpus run();

private:
    // helpers
    std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) { return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
    Address fresh(const char* role) { return labeled_address(std::string(role) + ":" + std::to_string(o_.seed) + ":" + std::to_string(nonce_++)); }
    int epoch(std::uint64_t block) const { return block >= o_.first_block + o_.blocks / 2 ? 1 : 0; }
    const Address& addr(Tok t) const { return token_addr_[t]; }
    /// Raw amount of `t` worth `usd`, at least one unit.
    U256 raw_for_usd(Tok t, const Rational& usd, std::uint64_t block) const {
        const U256 v = floor_u256(usd / kTokens[t].usd[epoch(block)] * Rational(pow10(kTokens[t].decimals)));
        return v == 0 ? U256(1) : v;
    }
    U256 convert(Tok from, const U256& raw, Tok to, std::uint64_t block, double edge) const {
        const Rational usd = Rational(BigInt(raw)) / Rational(pow10(kTokens[from].decimals)) * kTokens[from].usd[epoch(block)];
        const Rational scaled = usd * Rational(static_cast<long long>(std::llround(edge * 1e6)), 1'000'000);
        return raw_for_usd(to, scaled, block);
    }
    Tok other(std::size_t pool, Tok t) const { return kPools[pool].a == t ? kPools[pool].b : kPools[pool].a; }
    LogRecord swap(std::size_t pool, Tok in, const U256& amount_in, const U256& amount_out, const Address& sender) {
        return swap_log(state_.pools[pool], addr(in), amount_in, amount_out, sender, sender);
    }
    Rational random_usd(std::uint64_t lo_cents, std::uint64_t hi_cents) { return Rational(BigInt(uniform(lo_cents, hi_cents)), 100); }

    void build_state();
    void build_cycles();
    std::size_t pick_pool(const std::set<std::size_t>& reserved, bool sandwichable_only);

    Unit plant_arbitrage(std::uint64_t block, bool unpriced, bool double_cycle);
    Unit plant_sandwich(std::uint64_t block, std::set<std::size_t>& reserved);
    Unit plant_near_miss(std::uint64_t block, std::set<std::size_t>& reserved);
    Unit plant_liquidation(std::uint64_t block, bool compound);
    Unit decoy(std::uint64_t block, const std::set<std::size_t>& reserved);
    void append_arbitrage(TxSpec& tx, const Cycle& c, std::uint64_t block, bool unpriced);

    BlockData assemble(std::uint64_t number, std::vector<Unit> units);

    const CorpusOptions& o_;
    std::mt19937_64 rng_;
    std::uint64_t nonce_ = 0;
    Address token_addr_[kTokenCount];
    Address factories_[3];
    Address lending_pool_;
    ChainState state_;
    Manifest manifest_;
    std::vector<Cycle> priced_cycles_;
    std::vector<Cycle> orphan_cycles_;
};

void Generator::build_state() {
    state_.chain_id = o_.chain_id;
    for (int t = 0; t < kTokenCount; ++t) {
        token_addr_[t] = labeled_address(std::string("token:") + kTokens[t].symbol);
        state_.tokens.push_back({token_addr_[t], kTokens[t].decimals, kTokens[t].symbol});
    }
    factories_[0] = labeled_address("factory:v2:quick");
    factories_[1] = labeled_address("factory:v2:sushi");
    factories_[2] = labeled_address("factory:v3");
    lending_pool_ = labeled_address("aave:lending-pool");

    const std::uint64_t mid = o_.first_block + o_.blocks / 2;
    for (std::size_t i = 0; i < kPoolCount; ++i) {
        const PoolSpec& spec = kPools[i];
        SimPool p;
        p.address = labeled_address("pool:" + std::to_string(i));
        p.factory = factories_[spec.factory];
        p.family = spec.factory == 2 ? PoolFamily::v3 : PoolFamily::v2;
        p.fee = spec.fee;
        Tok t0 = spec.a, t1 = spec.b;
        if (token_addr_[t1] < token_addr_[t0]) std::swap(t0, t1);
        p.token0 = token_addr_[t0];
        p.token1 = token_addr_[t1];
        for (int e = 0; e < 2; ++e) {
            const std::uint64_t from = e == 0 ? 0 : mid;
            const Rational tvl(spec.tvl_usd);
            const U256 r0 = floor_u256(tvl / kTokens[t0].usd[e] * Rational(pow10(kTokens[t0].decimals)));
            const U256 r1 = floor_u256(tvl / kTokens[t1].usd[e] * Rational(pow10(kTokens[t1].decimals)));
            PoolStatePoint pt;
            pt.block = from;
            if (p.family == PoolFamily::v2) {
                pt.reserve0 = r0;
                pt.reserve1 = r1;
            } else {
                pt.sqrt_price_x96 = sqrt_price_x96_for(r0, r1);
                pt.liquidity = U256(boost::multiprecision::sqrt(BigInt(r0) * BigInt(r1)));
            }
            p.history.push_back(pt);
        }
        state_.pools.push_back(std::move(p));
    }
}

void Generator::build_cycles() {
    auto add = [&](Cycle c) {
        const bool orphan_start = c.tokens.front() == ORPHAN;
        (orphan_start ? orphan_cycles_ : priced_cycles_).push_back(std::move(c));
    };
    // Two pools over the same pair, in both directions.
    for (std::size_t i = 0; i < kPoolCount; ++i) {
        for (std::size_t j = 0; j < kPoolCount; ++j) {
            if (i == j) continue;
            const auto& p = kPools[i];
            const auto& q = kPools[j];
            const bool same = (p.a == q.a && p.b == q.b) || (p.a == q.b && p.b == q.a);
            if (!same) continue;
            for (Tok start : {p.a, p.b}) add({{i, j}, {start, other(i, start), start}});
        }
    }
    // Triangles.
    for (std::size_t i = 0; i < kPoolCount; ++i) {
        for (Tok start : {kPools[i].a, kPools[i].b}) {
            const Tok mid1 = other(i, start);
            for (std::size_t j = 0; j < kPoolCount; ++j) {
                if (j == i || (kPools[j].a != mid1 && kPools[j].b != mid1)) continue;
                const Tok mid2 = other(j, mid1);
                if (mid2 == start || mid2 == mid1) continue;
                for (std::size_t k = 0; k < kPoolCount; ++k) {
                    if (k == i || k == j) continue;
                    const bool closes = (kPools[k].a == mid2 && kPools[k].b == start) ||
                                        (kPools[k].b == mid2 && kPools[k].a == start);
                    if (closes) add({{i, j, k}, {start, mid1, mid2, start}});
                }
            }
        }
    }
}

std::size_t Generator::pick_pool(const std::set<std::size_t>& reserved, bool sandwichable_only) {
    std::vector<std::size_t> options;
    for (std::size_t i = 0; i < kPoolCount; ++i) {
        if (reserved.contains(i) || (sandwichable_only && !kPools[i].sandwichable)) continue;
        options.push_back(i);
    }
    if (options.empty()) throw PreconditionError("no free pool left in block");
    return options[uniform(0, options.size() - 1)];
}

void Generator::append_arbitrage(TxSpec& tx, const Cycle& c, std::uint64_t block, bool unpriced) {
    const Tok start = c.tokens.front();
    const U256 start_raw = raw_for_usd(start, random_usd(20'000, 2'000'000), block);

    // Profit in USD: mostly small, a few large, a few losses.
    Rational profit_usd;
    const auto roll = uniform(0, 99);
    if (roll < 8) {
        profit_usd = -random_usd(10, 2'000);
    } else if (roll < 75) {
        profit_usd = random_usd(5, 10'000);
    } else if (roll < 92) {
        profit_usd = random_usd(100, 1'000);
    } else {
        profit_usd = random_usd(10'000, 500'000);
    }
    U256 profit_mag = raw_for_usd(start, abs(profit_usd), block);
    const bool loss = profit_usd < 0;
    if (loss && profit_mag >= start_raw) profit_mag = start_raw / 2;

    PlantRef ref{PlantRef::arbitrage, manifest_.arbitrages.size(), {}};
    U256 amount = start_raw;
    for (std::size_t h = 0; h < c.pools.size(); ++h) {
        const Tok in = c.tokens[h];
        const Tok out = c.tokens[h + 1];
        U256 out_raw;
        if (h + 1 == c.pools.size()) {
            out_raw = loss ? start_raw - profit_mag : start_raw + profit_mag;
        } else {
            out_raw = convert(in, amount, out, block, 0.998 + static_cast<double>(uniform(0, 40)) / 10'000);
        }
        ref.positions.push_back(tx.logs.size());
        tx.logs.push_back(swap(c.pools[h], in, amount, out_raw, tx.sender));
        amount = out_raw;
    }
    PlantedArbitrage p;
    p.block = block;
    p.profit_token = addr(start);
    p.profit_raw = loss ? -I256(profit_mag) : I256(profit_mag);
    p.priced = !unpriced;
    manifest_.arbitrages.push_back(std::move(p));
    tx.plants.push_back(std::move(ref));
}

Unit Generator::plant_arbitrage(std::uint64_t block, bool unpriced, bool double_cycle) {
    TxSpec tx;
    tx.sender = fresh("searcher");
    tx.recipient = fresh("searcher-contract");
    if (double_cycle) {
        // Two cycles over disjoint token sets, so no longer cycle spans both.
        auto find = [&](std::vector<Cycle>& pool, Tok a, Tok b) -> const Cycle& {
            for (const auto& c : pool) {
                if (c.pools.size() == 2 && c.tokens[0] == a && c.tokens[1] == b) return c;
            }
            throw PreconditionError("missing cycle");
        };
        append_arbitrage(tx, find(priced_cycles_, WNATIVE, USDC), block, false);
        append_arbitrage(tx, find(priced_cycles_, WETH, ORPHAN), block, false);
        return {std::move(tx)};
    }
    if (!unpriced && chance(0.3)) {
        // A leading swap that starts no cycle: TOKC never returns.
        const std::size_t tokc_pool = 7;
        const U256 in = raw_for_usd(TOKC, random_usd(1'000, 50'000), block);
        tx.logs.push_back(swap(tokc_pool, TOKC, in, convert(TOKC, in, WNATIVE, block, 0.997), tx.sender));
    }
    auto& cycles = unpriced ? orphan_cycles_ : priced_cycles_;
    append_arbitrage(tx, cycles[uniform(0, cycles.size() - 1)], block, unpriced);
    if (chance(0.3)) tx.logs.push_back(transfer_log(addr(WETH), tx.sender, fresh("builder"), 1'000'000'000));
    return {std::move(tx)};
}

Unit Generator::plant_sandwich(std::uint64_t block, std::set<std::size_t>& reserved) {
    const std::size_t pool = pick_pool(reserved, true);
    reserved.insert(pool);
    const Tok x = chance(0.5) ? kPools[pool].a : kPools[pool].b;
    const Tok y = other(pool, x);
    const Address attacker = fresh("sandwicher");

    const std::size_t idx = manifest_.sandwiches.size();
    Unit unit;
    const U256 front_in = raw_for_usd(x, random_usd(100'000, 5'000'000), block);
    const U256 front_out = convert(x, front_in, y, block, 0.997);
    TxSpec front;
    front.sender = attacker;
    front.logs.push_back(swap(pool, x, front_in, front_out, attacker));
    front.plants.push_back({PlantRef::frontrun, idx, {0}});
    unit.push_back(std::move(front));

    const auto victims = uniform(1, 2);
    for (std::uint64_t v = 0; v < victims; ++v) {
        TxSpec tx;
        tx.sender = fresh("victim");
        const U256 in = raw_for_usd(x, random_usd(50'000, 3'000'000), block);
        tx.logs.push_back(transfer_log(addr(x), tx.sender, state_.pools[pool].address, in));
        tx.logs.push_back(swap(pool, x, in, convert(x, in, y, block, 0.99), tx.sender));
        tx.plants.push_back({PlantRef::victim, idx, {1}});
        unit.push_back(std::move(tx));
    }

    const U256 profit = raw_for_usd(x, random_usd(50, 20'000), block);
    TxSpec back;
    back.sender = attacker;
    back.logs.push_back(swap(pool, y, front_out, front_in + profit, attacker));
    back.plants.push_back({PlantRef::backrun, idx, {0}});
    unit.push_back(std::move(back));

    PlantedSandwich s;
    s.block = block;
    s.profit_token = addr(x);
    s.profit_raw = I256(profit);
    manifest_.sandwiches.push_back(std::move(s));
    return unit;
}

Unit Generator::plant_near_miss(std::uint64_t block, std::set<std::size_t>& reserved) {
    const std::size_t pool = pick_pool(reserved, true);
    reserved.insert(pool);
    const Tok x = kPools[pool].a;
    const Tok y = kPools[pool].b;
    const Address attacker = fresh("near-miss");
    const U256 in = raw_for_usd(x, random_usd(100'000, 1'000'000), block);
    const U256 out = convert(x, in, y, block, 0.997);
    Unit unit;
    auto tx_with = [&](const Address& sender, Tok from, const U256& a, const U256& b) {
        TxSpec tx;
        tx.sender = sender;
        tx.logs.push_back(swap(pool, from, a, b, sender));
        return tx;
    };
    unit.push_back(tx_with(attacker, x, in, out));
    switch (uniform(0, 2)) {
        case 0:  // closing swap from a different account
            unit.push_back(tx_with(fresh("victim"), x, in / 3 + 1, out / 3 + 1));
            unit.push_back(tx_with(fresh("other"), y, out, in));
            break;
        case 1:  // round trip with nobody in between
            unit.push_back(tx_with(attacker, y, out, in));
            break;
        default:  // the "victim" trades the other way
            unit.push_back(tx_with(fresh("victim"), y, out / 2 + 1, in / 2 + 1));
            unit.push_back(tx_with(attacker, y, out, in));
            break;
    }
    ++manifest_.decoys.near_miss_sandwiches;
    return unit;
}

Unit Generator::plant_liquidation(std::uint64_t block, bool compound) {
    TxSpec tx;
    tx.sender = fresh("liquidator");
    PlantedLiquidation p;
    p.block = block;
    const Rational debt_usd = random_usd(50'000, 5'000'000);
    if (compound) {
        const U256 repay = raw_for_usd(CUSDC, debt_usd, block);
        const U256 seize = raw_for_usd(CWETH, debt_usd * Rational(108, 100), block);
        tx.logs.push_back(transfer_log(addr(CUSDC), tx.sender, addr(CUSDC), repay));
        tx.logs.push_back(compound_liquidation_log(addr(CUSDC), tx.sender, fresh("borrower"), repay, addr(CWETH), seize));
        p.protocol = "compound";
        p.priced = false;
    } else {
        const Tok debt = chance(0.5) ? USDC : WETH;
        const Tok coll = debt == USDC ? (chance(0.5) ? WETH : WNATIVE) : WNATIVE;
        const U256 repay = raw_for_usd(debt, debt_usd, block);
        const U256 seize = raw_for_usd(coll, debt_usd * Rational(105, 100), block);
        tx.logs.push_back(aave_liquidation_log(lending_pool_, addr(coll), addr(debt), fresh("borrower"), repay, seize,
                                               tx.sender));
        p.protocol = "aave_v2";
    }
    tx.plants.push_back({PlantRef::liquidation, manifest_.liquidations.size(), {tx.logs.size() - 1}});
    manifest_.liquidations.push_back(std::move(p));
    return {std::move(tx)};
}

Unit Generator::decoy(std::uint64_t block, const std::set<std::size_t>& reserved) {
    TxSpec tx;
    tx.sender = fresh("user");
    tx.recipient = fresh("contract");
    const auto kind = o_.decoys ? uniform(0, 9) : 0;
    auto random_swap = [&](std::size_t pool, Tok in) {
        const U256 a = raw_for_usd(in, random_usd(100, 500'000), block);
        return swap(pool, in, a, convert(in, a, other(pool, in), block, 0.997), tx.sender);
    };
    switch (kind) {
        case 0:
        case 1: {  // plain transfers
            const auto n = uniform(0, 3);
            for (std::uint64_t i = 0; i < n; ++i) {
                tx.logs.push_back(transfer_log(addr(static_cast<Tok>(uniform(0, TOKC))), tx.sender, fresh("payee"),
                                               uniform(1, 1'000'000'000)));
            }
            break;
        }
        case 2:
        case 3: {  // a lone swap
            const std::size_t pool = pick_pool(reserved, false);
            tx.logs.push_back(transfer_log(addr(kPools[pool].a), tx.sender, state_.pools[pool].address, 1));
            tx.logs.push_back(random_swap(pool, chance(0.5) ? kPools[pool].a : kPools[pool].b));
            break;
        }
        case 4: {  // two chained swaps that do not close
            std::size_t p1 = pick_pool(reserved, false);
            const Tok a = kPools[p1].a;
            const Tok b = kPools[p1].b;
            std::vector<std::size_t> nexts;
            for (std::size_t j = 0; j < kPoolCount; ++j) {
                if (j == p1 || reserved.contains(j)) continue;
                const bool has_b = kPools[j].a == b || kPools[j].b == b;
                if (has_b && other(j, b) != a) nexts.push_back(j);
            }
            tx.logs.push_back(random_swap(p1, a));
            if (!nexts.empty()) {
                const std::size_t p2 = nexts[uniform(0, nexts.size() - 1)];
                const U256 in = raw_for_usd(b, random_usd(100, 100'000), block);
                tx.logs.push_back(swap(p2, b, in, convert(b, in, other(p2, b), block, 0.997), tx.sender));
            }
            break;
        }
        case 5: {  // round trip through a single pool
            const std::size_t pool = pick_pool(reserved, false);
            const Tok a = kPools[pool].a;
            const U256 in = raw_for_usd(a, random_usd(1'000, 100'000), block);
            const U256 mid = convert(a, in, other(pool, a), block, 0.997);
            tx.logs.push_back(swap(pool, a, in, mid, tx.sender));
            tx.logs.push_back(swap(pool, other(pool, a), mid, in + 1, tx.sender));
            break;
        }
        case 6:  // reverted
            tx.reverted = true;
            ++manifest_.decoys.reverted;
            break;
        case 7: {  // malformed swap
            const std::size_t pool = pick_pool(reserved, false);
            const Address& pa = state_.pools[pool].address;
            if (state_.pools[pool].family == PoolFamily::v2) {
                tx.logs.push_back(v2_swap_log(pa, 5, 7, 0, 0, tx.sender, tx.sender));
            } else {
                tx.logs.push_back(v3_swap_log(pa, false, 5, false, 7, tx.sender, tx.sender));
            }
            ++manifest_.decoys.malformed;
            break;
        }
        case 8: {  // swap event from a contract that is not a pool
            tx.logs.push_back(v2_swap_log(fresh("fake-pool"), 10, 0, 0, 20, tx.sender, tx.sender));
            ++manifest_.decoys.unresolved;
            break;
        }
        default:  // no logs at all
            break;
    }
    return {std::move(tx)};
}

BlockData Generator::assemble(std::uint64_t number, std::vector<Unit> units) {
    // Random interleaving that keeps each unit's order.
    std::vector<TxSpec> order;
    std::vector<std::size_t> cursor(units.size(), 0);
    std::size_t remaining = 0;
    for (const auto& u : units) remaining += u.size();
    while (remaining > 0) {
        std::uint64_t pick = uniform(0, remaining - 1);
        for (std::size_t i = 0; i < units.size(); ++i) {
            const std::size_t left = units[i].size() - cursor[i];
            if (pick < left) {
                order.push_back(std::move(units[i][cursor[i]++]));
                break;
            }
            pick -= left;
        }
        --remaining;
    }

    static const Hash32 transfer_topic = topic_for_signature("Transfer(address,address,uint256)");
    BlockData b;
    b.number = number;
    b.timestamp = o_.start_timestamp + (number - o_.first_block) * o_.block_time;
    std::uint64_t log_index = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        TxSpec& spec = order[i];
        TransactionRecord tx;
        tx.index = i;
        tx.hash = labeled_hash("tx:" + std::to_string(o_.seed) + ":" + std::to_string(number) + ":" + std::to_string(i));
        tx.sender = spec.sender;
        tx.recipient = spec.recipient;
        tx.gas_used = 21'000 + 60'000 * spec.logs.size();
        tx.status = spec.reverted ? TxStatus::reverted : TxStatus::success;
        const std::uint64_t first_log = log_index;
        for (auto& log : spec.logs) {
            log.log_index = log_index++;
            if (log.topics.front() == transfer_topic) ++manifest_.decoys.unregistered;
            tx.logs.push_back(std::move(log));
        }
        for (const auto& ref : spec.plants) {
            switch (ref.kind) {
                case PlantRef::arbitrage: {
                    auto& p = manifest_.arbitrages[ref.index];
                    p.tx_hash = tx.hash;
                    for (auto pos : ref.positions) p.log_indices.push_back(first_log + pos);
                    break;
                }
                case PlantRef::frontrun: manifest_.sandwiches[ref.index].frontrun_tx = tx.hash; break;
                case PlantRef::victim: manifest_.sandwiches[ref.index].victim_txs.push_back(tx.hash); break;
                case PlantRef::backrun: manifest_.sandwiches[ref.index].backrun_tx = tx.hash; break;
                case PlantRef::liquidation: {
                    auto& p = manifest_.liquidations[ref.index];
                    p.tx_hash = tx.hash;
                    p.log_index = first_log + ref.positions.front();
                    break;
                }
            }
        }
        b.transactions.push_back(std::move(tx));
    }
    return b;
}

Corpus Generator::run() {
    if (o_.blocks == 0) throw PreconditionError("corpus needs at least one block");
    if (o_.unpriced_arbitrages > o_.arbitrages) throw PreconditionError("more unpriced arbitrages than arbitrages");
    build_state();
    build_cycles();

    manifest_.chain_id = o_.chain_id;
    manifest_.first_block = o_.first_block;
    manifest_.last_block = o_.first_block + o_.blocks - 1;
    manifest_.unpriced_tokens = {addr(ORPHAN), addr(CUSDC), addr(CWETH)};

    // Which block each plant lands in.
    enum Plan { arb, arb_unpriced, arb_double, sandwich, near_miss, liq_aave, liq_compound };
    std::vector<std::vector<Plan>> plan(o_.blocks);
    auto any_block = [&] { return uniform(0, o_.blocks - 1); };
    unsigned arbs_left = o_.arbitrages;
    if (o_.arbitrages - o_.unpriced_arbitrages >= 10) {
        plan[any_block()].push_back(arb_double);
        arbs_left -= 2;
    }
    for (unsigned i = 0; i < o_.unpriced_arbitrages; ++i, --arbs_left) plan[any_block()].push_back(arb_unpriced);
    for (; arbs_left > 0; --arbs_left) plan[any_block()].push_back(arb);
    // Sandwiches spread over distinct blocks where possible.
    std::vector<std::uint64_t> blocks(o_.blocks);
    for (std::uint64_t i = 0; i < o_.blocks; ++i) blocks[i] = i;
    std::shuffle(blocks.begin(), blocks.end(), rng_);
    for (unsigned i = 0; i < o_.sandwiches; ++i) plan[blocks[i % blocks.size()]].push_back(sandwich);
    if (o_.decoys) {
        for (unsigned i = 0; i < std::max(2u, o_.sandwiches); ++i) plan[any_block()].push_back(near_miss);
    }
    for (unsigned i = 0; i < o_.liquidations; ++i) {
        plan[any_block()].push_back(i == 1 ? liq_compound : liq_aave);
    }

    Corpus corpus;
    for (std::uint64_t i = 0; i < o_.blocks; ++i) {
        const std::uint64_t number = o_.first_block + i;
        std::set<std::size_t> reserved;  // pools kept free of unclaimed swaps in this block
        std::vector<Unit> units;
        for (Plan p : plan[i]) {
            switch (p) {
                case arb: units.push_back(plant_arbitrage(number, false, false)); break;
                case arb_unpriced: units.push_back(plant_arbitrage(number, true, false)); break;
                case arb_double: units.push_back(plant_arbitrage(number, false, true)); break;
                case sandwich: units.push_back(plant_sandwich(number, reserved)); break;
                case near_miss: units.push_back(plant_near_miss(number, reserved)); break;
                case liq_aave: units.push_back(plant_liquidation(number, false)); break;
                case liq_compound: units.push_back(plant_liquidation(number, true)); break;
            }
        }
        for (unsigned d = 0; d < o_.background_txs; ++d) units.push_back(decoy(number, reserved));
        corpus.blocks.push_back(assemble(number, std::move(units)));
    }

    ChainConfig& cfg = corpus.config;
    cfg.chain_id = o_.chain_id;
    cfg.name = "synthetic";
    cfg.rpc_endpoint = "fixture:state.json";
    cfg.native_wrapped_token = addr(WNATIVE);
    cfg.usdc_token = addr(USDC);
    cfg.dex_factories = {{factories_[0], PoolFamily::v2, {}, "quick-v2"},
                         {factories_[1], PoolFamily::v2, {}, "sushi-v2"},
                         {factories_[2], PoolFamily::v3, {500, 3000, 10000}, "uniswap-v3"}};
    cfg.sandwiches_possible = true;
    for (int t = 0; t < kTokenCount; ++t) cfg.token_labels[addr(static_cast<Tok>(t))] = kTokens[t].symbol;

    corpus.state = std::move(state_);
    corpus.manifest = std::move(manifest_);
    return corpus;
}

}  // namespace

Corpus generate_corpus(const CorpusOptions& options) { return Generator(options).run(); }

CorpusPaths write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    CorpusPaths paths{dir / "chain.yaml", dir / "state.json", dir / "blocks.ndjson", dir / "manifest.json"};
    record_fixture(corpus.blocks, corpus.config.chain_id, paths.blocks);
    write_chain_state(corpus.state, paths.state, "blocks.ndjson");
    {
        std::ofstream out(paths.config, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + paths.config.string());
        out << dump_chain_config(corpus.config);
    }
    {
        std::ofstream out(paths.manifest, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + paths.manifest.string());
        out << corpus.manifest.to_json().dump(1) << '\n';
    }
    return paths;
}

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open manifest " + path.string());
    return Manifest::from_json(json::parse(in));
}

// ----- matching

double MatchReport::precision() const {
    const auto detected = true_positives + false_positives;
    return detected == 0 ? 1.0 : static_cast<double>(true_positives) / static_cast<double>(detected);
}

double MatchReport::recall() const {
    const auto planted = true_positives + false_negatives;
    return planted == 0 ? 1.0 : static_cast<double>(true_positives) / static_cast<double>(planted);
}

namespace {

std::string arb_key(const Hash32& tx, std::vector<std::uint64_t> logs, const Address& token, const I256& profit) {
    std::sort(logs.begin(), logs.end());
    std::string k = "arbitrage " + tx.hex() + " logs";
    for (auto l : logs) k += " " + std::to_string(l);
    return k + " profit " + to_dec(profit) + " " + token.hex();
}

std::string sandwich_key(const Hash32& front, const Hash32& back, std::vector<Hash32> victims, const Address& token,
                         const I256& profit) {
    std::sort(victims.begin(), victims.end());
    std::string k = "sandwich " + front.hex() + " / " + back.hex() + " victims";
    for (const auto& v : victims) k += " " + v.hex();
    return k + " profit " + to_dec(profit) + " " + token.hex();
}

std::string liquidation_key(const Hash32& tx, std::uint64_t log) {
    return "liquidation " + tx.hex() + " log " + std::to_string(log);
}

}  // namespace

MatchReport match_manifest(const Manifest& manifest, const std::vector<MevFindings>& findings) {
    std::multiset<std::string> planted;
    for (const auto& a : manifest.arbitrages) planted.insert(arb_key(a.tx_hash, a.log_indices, a.profit_token, a.profit_raw));
    for (const auto& s : manifest.sandwiches) {
        planted.insert(sandwich_key(s.frontrun_tx, s.backrun_tx, s.victim_txs, s.profit_token, s.profit_raw));
    }
    for (const auto& l : manifest.liquidations) planted.insert(liquidation_key(l.tx_hash, l.log_index));

    std::multiset<std::string> detected;
    for (const auto& f : findings) {
        for (const auto& a : f.arbitrages) {
            std::vector<std::uint64_t> logs;
            for (const auto& s : a.path) logs.push_back(s.log_index);
            detected.insert(arb_key(a.tx_hash, logs, a.profit_token, a.profit_raw));
        }
        for (const auto& s : f.sandwiches) {
            std::vector<Hash32> victims;
            for (const auto& v : s.victims) victims.push_back(v.tx_hash);
            detected.insert(sandwich_key(s.frontrun.tx_hash, s.backrun.tx_hash, victims, s.profit_token, s.profit_raw));
        }
        for (const auto& l : f.liquidations) detected.insert(liquidation_key(l.tx_hash, l.log_index));
    }

    MatchReport r;
    std::vector<std::string> missing, extra;
    std::set_difference(planted.begin(), planted.end(), detected.begin(), detected.end(), std::back_inserter(missing));
    std::set_difference(detected.begin(), detected.end(), planted.begin(), planted.end(), std::back_inserter(extra));
    r.false_negatives = missing.size();
    r.false_positives = extra.size();
    r.true_positives = planted.size() - missing.size();
    for (auto& m : missing) r.mismatches.push_back("missed: " + m);
    for (auto& e : extra) r.mismatches.push_back("unexpected: " + e);
    return r;
}

}  // namespace mev::synth
