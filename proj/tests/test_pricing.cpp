#include <gtest/gtest.h>
#include <gmpxx.h>

#include <random>

#include "mev/pricing.hpp"
#include "mev/simulated_node.hpp"
#include "support.hpp"

using namespace mev;
namespace ts = testing_support;

namespace {

mpz_class to_mpz(const BigInt& v) { return mpz_class(v.str(), 10); }
mpz_class to_mpz(const U256& v) { return mpz_class(to_dec(v), 10); }
mpq_class to_mpq(const Rational& r) {
    mpq_class q(to_mpz(boost::multiprecision::numerator(r)), to_mpz(boost::multiprecision::denominator(r)));
    q.canonicalize();
    return q;
}
mpz_class pow10z(unsigned e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
    return r;
}

// Reference quotes computed with GMP from the pool definitions.
mpq_class ref_v2(const U256& r0, const U256& r1, unsigned d0, unsigned d1) {
    mpq_class q(to_mpz(r0) * pow10z(d1), to_mpz(r1) * pow10z(d0));
    q.canonicalize();
    return q;
}
mpq_class ref_v3(const U256& sqrt_price, unsigned d0, unsigned d1) {
    mpz_class two96 = mpz_class(1) << 96;
    mpq_class q(two96 * two96 * pow10z(d1), to_mpz(sqrt_price) * to_mpz(sqrt_price) * pow10z(d0));
    q.canonicalize();
    return q;
}

U256 random_u256(std::mt19937_64& rng, unsigned bits) {
    U256 v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 64) | rng();
    if (bits < 256) v &= (U256(1) << bits) - 1;
    return v == 0 ? U256(1) : v;
}

}  // namespace

TEST(SpotPrice, V2Examples) {
    const auto p = spot_price_v2(U256(2'000'000'000), U256(1'000'000'000'000'000'000ULL), 6, 18);
    ASSERT_TRUE(p);
    EXPECT_EQ(*p, Rational(2000));
    EXPECT_EQ(*spot_price_v2(1, 1, 18, 18), Rational(1));
    EXPECT_FALSE(spot_price_v2(5, 0, 18, 18));
    EXPECT_FALSE(spot_price_v2(0, 5, 18, 18));
}

TEST(SpotPrice, V3Examples) {
    const U256 q96 = U256(1) << 96;
    EXPECT_EQ(*spot_price_v3(q96, 18, 18), Rational(1));
    EXPECT_EQ(*spot_price_v3(q96 * 2, 18, 18), Rational(1, 4));
    EXPECT_FALSE(spot_price_v3(0, 18, 18));
}

TEST(SpotPrice, MatchesGmpOracle) {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<unsigned> dec(0, 24), bits(1, 112), sbits(1, 160);
    for (int i = 0; i < 2000; ++i) {
        const unsigned d0 = dec(rng), d1 = dec(rng);
        const U256 r0 = random_u256(rng, bits(rng)), r1 = random_u256(rng, bits(rng));
        const auto v2 = spot_price_v2(r0, r1, d0, d1);
        ASSERT_TRUE(v2);
        EXPECT_EQ(to_mpq(*v2), ref_v2(r0, r1, d0, d1)) << to_dec(r0) << "/" << to_dec(r1) << " d" << d0 << "," << d1;

        const U256 sp = random_u256(rng, sbits(rng));
        const auto v3 = spot_price_v3(sp, d0, d1);
        ASSERT_TRUE(v3);
        EXPECT_EQ(to_mpq(*v3), ref_v3(sp, d0, d1)) << to_dec(sp);
    }
}

namespace {

struct PricingEnv {
    ts::MiniChain m = ts::mini_chain();
    std::shared_ptr<SimulatedNode> node;
    std::shared_ptr<RpcClient> client;
    std::unique_ptr<RpcStateReader> reader;
    std::unique_ptr<PriceOracle> oracle;

    void start() {
        node = std::make_shared<SimulatedNode>(ChainFixture{m.state, {}});
        client = std::make_shared<RpcClient>(node);
        reader = std::make_unique<RpcStateReader>(client, m.config.retry);
        oracle = std::make_unique<PriceOracle>(m.config, *reader);
    }
};

SimPool v2_pool(const Address& address, const Address& factory, Address a, const U256& ra, Address b, const U256& rb) {
    SimPool p;
    p.address = address;
    p.factory = factory;
    p.family = PoolFamily::v2;
    U256 r0 = ra, r1 = rb;
    if (b < a) {
        std::swap(a, b);
        std::swap(r0, r1);
    }
    p.token0 = a;
    p.token1 = b;
    PoolStatePoint pt;
    pt.reserve0 = r0;
    pt.reserve1 = r1;
    p.history = {pt};
    return p;
}

const U256 kE18 = U256(1'000'000'000'000'000'000ULL);

}  // namespace

TEST(PriceToken, UsdcIsNumeraire) {
    PricingEnv env;
    env.start();
    const auto p = env.oracle->price_token_usd(env.m.usdc, 1);
    EXPECT_EQ(p.route, PriceRoute::direct_usdc);
    EXPECT_EQ(*p.usd_price, Rational(1));
    EXPECT_FALSE(env.oracle->find_usdc_pool(env.m.usdc, 1));
}

TEST(PriceToken, DirectV2Pair) {
    PricingEnv env;
    env.m.config.dex_factories.pop_back();  // V2 only
    env.start();
    const auto pool = env.oracle->find_usdc_pool(env.m.weth, 1);
    ASSERT_TRUE(pool);
    EXPECT_EQ(pool->pool, env.m.usdc_weth_v2);
    const auto p = env.oracle->price_token_usd(env.m.weth, 1);
    EXPECT_EQ(p.route, PriceRoute::direct_usdc);
    EXPECT_EQ(*p.usd_price, Rational(2000));
}

TEST(PriceToken, DeepestV3TierChosen) {
    PricingEnv env;
    env.start();
    const auto pool = env.oracle->find_usdc_pool(env.m.weth, 1);
    ASSERT_TRUE(pool);
    EXPECT_EQ(pool->pool, env.m.weth_usdc_v3_3000);
    EXPECT_EQ(pool->fee_tier, 3000u);

    // Swap which tier is deeper.
    PricingEnv env2;
    env2.m.state.pools[3].history[0].liquidity = U256(50) * kE18;
    env2.start();
    EXPECT_EQ(env2.oracle->find_usdc_pool(env2.m.weth, 1)->pool, env2.m.weth_usdc_v3_500);
}

TEST(PriceToken, ViaNativeIsExactProduct) {
    PricingEnv env;
    env.start();
    const auto p = env.oracle->price_token_usd(env.m.tok, 1);
    EXPECT_EQ(p.route, PriceRoute::via_native);
    // TOK/WNATIVE = 1000/4000, WNATIVE/USDC = 500000/1000000
    const Rational expected = Rational(1000, 4000) * Rational(500'000, 1'000'000);
    EXPECT_EQ(*p.usd_price, expected);
    EXPECT_EQ(p.source_pools.size(), 2u);

    PricingEnv no_hop;
    no_hop.m.config.native_hop_pricing = false;
    no_hop.start();
    EXPECT_EQ(no_hop.oracle->price_token_usd(no_hop.m.tok, 1).route, PriceRoute::unpriced);
}

TEST(PriceToken, NoPoolsIsUnpriced) {
    PricingEnv env;
    env.start();
    const auto p = env.oracle->price_token_usd(env.m.lone, 1);
    EXPECT_EQ(p.route, PriceRoute::unpriced);
    EXPECT_FALSE(p.usd_price);
}

TEST(PriceToken, TransportFailureIsNotUnpriced) {
    PricingEnv env;
    env.m.config.retry.attempts = 2;
    env.start();
    env.node->set_fault_injector([](const json&) { return true; });
    EXPECT_THROW(env.oracle->price_token_usd(env.m.weth, 1), RpcError);
}

TEST(PriceFindings, ArbitrageInNativeToken) {
    PricingEnv env;
    // WNATIVE at 0.80 USDC.
    env.m.state.pools[1].history[0].reserve0 = U256(800'000) * 1'000'000;
    env.start();
    MevFindings f;
    f.block_number = 3;
    f.timestamp = 1'640'995'200;
    Arbitrage a;
    a.tx_hash = ts::tx(1);
    a.block_number = 3;
    a.profit_token = env.m.wnative;
    a.path.resize(2);
    a.profit_raw = I256(3) * I256(kE18);
    f.arbitrages.push_back(a);
    a.tx_hash = ts::tx(2);
    a.tx_index = 1;
    a.profit_token = env.m.lone;
    f.arbitrages.push_back(a);

    const auto recs = env.oracle->price_findings(f);
    ASSERT_EQ(recs.size(), 2u);
    ASSERT_TRUE(recs[0].usd_profit);
    EXPECT_EQ(recs[0].usd_profit->str(), "2.400000");
    EXPECT_EQ(recs[0].route, PriceRoute::direct_usdc);
    EXPECT_EQ(recs[0].day, "2022-01-01");
    EXPECT_EQ(recs[0].path_length, 2u);
    EXPECT_FALSE(recs[1].usd_profit);
    EXPECT_EQ(recs[1].route, PriceRoute::unpriced);
    EXPECT_EQ(recs[1].profit_raw, I256(3) * I256(kE18));
}

TEST(PriceFindings, LiquidationNetsTheLegs) {
    PricingEnv env;
    const Address coll = Address::from_hex("0x6000000000000000000000000000000000000006");
    env.m.state.tokens.push_back({coll, 18, "COLL"});
    // COLL at 2.0 USDC.
    env.m.state.pools.push_back(v2_pool(Address::from_hex("0xa000000000000000000000000000000000000009"),
                                        env.m.v2_factory, coll, U256(1000) * kE18, env.m.usdc,
                                        U256(2000) * 1'000'000));
    env.start();
    MevFindings f;
    f.block_number = 3;
    LiquidationEvent l;
    l.tx_hash = ts::tx(4);
    l.block_number = 3;
    l.protocol = "aave_v2";
    l.collateral_token = coll;
    l.collateral_seized = U256(100) * kE18;
    l.debt_token = env.m.usdc;
    l.debt_repaid = U256(150) * 1'000'000;
    f.liquidations.push_back(l);
    const auto recs = env.oracle->price_findings(f);
    ASSERT_EQ(recs.size(), 1u);
    ASSERT_TRUE(recs[0].usd_profit);
    // 100 * 2.0 - 150 * 1.0
    const Rational independent = Rational(100) * Rational(2) - Rational(150);
    EXPECT_EQ(recs[0].usd_profit->to_rational(), independent);
    EXPECT_EQ(recs[0].kind, FindingKind::liquidation);
    EXPECT_EQ(recs[0].path_length, 0u);
}
