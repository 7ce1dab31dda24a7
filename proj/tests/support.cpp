#include "support.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace testing_support {

using namespace mev;

TempDir::TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "mevtest-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
}

Address addr(std::uint64_t n) { return address_from_u64(n); }
Hash32 tx(std::uint64_t n) { return hash_from_u64(n); }

SwapEvent swap(std::uint64_t tx_n, std::uint64_t log_index, std::uint64_t pool_n, std::uint64_t token_in_n,
               std::uint64_t token_out_n, U256 amount_in, U256 amount_out, std::uint64_t initiator_n,
               std::uint64_t tx_index) {
    SwapEvent s;
    s.tx_hash = tx(tx_n);
    s.block_number = 1;
    s.tx_index = tx_index;
    s.log_index = log_index;
    s.pool = addr(1000 + pool_n);
    s.token_in = addr(token_in_n);
    s.token_out = addr(token_out_n);
    s.amount_in = amount_in;
    s.amount_out = amount_out;
    s.initiator = addr(5000 + initiator_n);
    s.recipient = s.initiator;
    return s;
}

namespace {

SimPool make_pool(const Address& address, const Address& factory, PoolFamily family, std::uint32_t fee, Address a,
                  Address b) {
    SimPool p;
    p.address = address;
    p.factory = factory;
    p.family = family;
    p.fee = fee;
    if (b < a) std::swap(a, b);
    p.token0 = a;
    p.token1 = b;
    return p;
}

PoolStatePoint v2_point(std::uint64_t block, const U256& r0, const U256& r1) {
    PoolStatePoint pt;
    pt.block = block;
    pt.reserve0 = r0;
    pt.reserve1 = r1;
    return pt;
}

PoolStatePoint v3_point(std::uint64_t block, const U256& sqrt_price, const U256& liquidity) {
    PoolStatePoint pt;
    pt.block = block;
    pt.sqrt_price_x96 = sqrt_price;
    pt.liquidity = liquidity;
    return pt;
}

}  // namespace

MiniChain mini_chain() {
    MiniChain m;
    // Addresses chosen so token ordering is obvious: usdc < weth < wnative < tok < lone.
    m.usdc = Address::from_hex("0x1000000000000000000000000000000000000001");
    m.weth = Address::from_hex("0x2000000000000000000000000000000000000002");
    m.wnative = Address::from_hex("0x3000000000000000000000000000000000000003");
    m.tok = Address::from_hex("0x4000000000000000000000000000000000000004");
    m.lone = Address::from_hex("0x5000000000000000000000000000000000000005");
    m.v2_factory = Address::from_hex("0xf200000000000000000000000000000000000002");
    m.v3_factory = Address::from_hex("0xf300000000000000000000000000000000000003");
    m.usdc_weth_v2 = Address::from_hex("0xa000000000000000000000000000000000000001");
    m.native_usdc_v2 = Address::from_hex("0xa000000000000000000000000000000000000002");
    m.tok_native_v2 = Address::from_hex("0xa000000000000000000000000000000000000003");
    m.weth_usdc_v3_500 = Address::from_hex("0xa000000000000000000000000000000000000004");
    m.weth_usdc_v3_3000 = Address::from_hex("0xa000000000000000000000000000000000000005");

    m.state.chain_id = 31337;
    m.state.tokens = {{m.usdc, 6, "USDC"}, {m.weth, 18, "WETH"}, {m.wnative, 18, "WNATIVE"}, {m.tok, 18, "TOK"},
                      {m.lone, 18, "LONE"}};

    const U256 e18 = U256(1'000'000'000'000'000'000ULL);
    // USDC/WETH v2: 2,000,000 USDC vs 1,000 WETH -> WETH = 2000 USDC.
    SimPool p1 = make_pool(m.usdc_weth_v2, m.v2_factory, PoolFamily::v2, 0, m.usdc, m.weth);
    p1.history = {v2_point(0, U256(2'000'000) * 1'000'000, U256(1000) * e18)};
    // WNATIVE/USDC v2: 1,000,000 WNATIVE vs 500,000 USDC -> WNATIVE = 0.5 USDC.
    SimPool p2 = make_pool(m.native_usdc_v2, m.v2_factory, PoolFamily::v2, 0, m.wnative, m.usdc);
    p2.history = {v2_point(0, U256(500'000) * 1'000'000, U256(1'000'000) * e18)};  // token0 = usdc
    // TOK/WNATIVE v2: 1000 WNATIVE vs 4000 TOK -> TOK = 0.25 WNATIVE = 0.125 USDC.
    SimPool p3 = make_pool(m.tok_native_v2, m.v2_factory, PoolFamily::v2, 0, m.tok, m.wnative);
    p3.history = {v2_point(0, U256(1000) * e18, U256(4000) * e18)};  // token0 = wnative
    // WETH/USDC v3 at two fee tiers; the 3000 tier is deeper. token0 = usdc, token1 = weth.
    const U256 sqrt_2000 = synth::sqrt_price_x96_for(U256(2000) * 1'000'000, e18);  // 1 WETH per 2000 USDC
    SimPool p4 = make_pool(m.weth_usdc_v3_500, m.v3_factory, PoolFamily::v3, 500, m.weth, m.usdc);
    p4.history = {v3_point(0, sqrt_2000, U256(10) * e18)};
    SimPool p5 = make_pool(m.weth_usdc_v3_3000, m.v3_factory, PoolFamily::v3, 3000, m.weth, m.usdc);
    p5.history = {v3_point(0, sqrt_2000, U256(20) * e18)};
    m.state.pools = {p1, p2, p3, p4, p5};

    m.config.chain_id = 31337;
    m.config.name = "mini";
    m.config.rpc_endpoint = "fixture:state.json";
    m.config.native_wrapped_token = m.wnative;
    m.config.usdc_token = m.usdc;
    m.config.dex_factories = {{m.v2_factory, PoolFamily::v2, {}, "v2"}, {m.v3_factory, PoolFamily::v3, {500, 3000}, "v3"}};
    m.config.sandwiches_possible = true;
    m.config.retry.base_delay = std::chrono::milliseconds(1);
    return m;
}

CliResult run_cli(const std::string& args, const std::string& env) {
    TempDir tmp;
    const auto out = tmp / "out.txt";
    const auto err = tmp / "err.txt";
    const std::string cmd = (env.empty() ? "" : env + " ") + std::string(MEVINSPECT_BIN) + " " + args + " >" +
                            out.string() + " 2>" + err.string();
    const int raw = std::system(cmd.c_str());
    CliResult r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = read_file(out);
    r.err = read_file(err);
    return r;
}


std::vector<std::vector<std::size_t>> reference_cycles(const std::vector<SwapEvent>& swaps) {
    const std::size_t n = swaps.size();
    std::vector<bool> used(n, false);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t start = 0; start < n; ++start) {
        if (used[start]) continue;
        std::optional<std::vector<std::size_t>> best;
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            if (!(mask & (1u << start)) || (mask & ((1u << start) - 1))) continue;
            std::vector<std::size_t> seq;
            bool ok = true;
            for (std::size_t i = 0; i < n && ok; ++i) {
                if (mask & (1u << i)) {
                    if (used[i]) ok = false;
                    seq.push_back(i);
                }
            }
            if (!ok || seq.size() < 2) continue;
            std::set<Address> pools;
            for (std::size_t k = 0; k < seq.size(); ++k) {
                pools.insert(swaps[seq[k]].pool);
                if (k + 1 < seq.size() && swaps[seq[k]].token_out != swaps[seq[k + 1]].token_in) ok = false;
            }
            if (!ok || pools.size() < 2 || swaps[seq.back()].token_out != swaps[seq.front()].token_in) continue;
            if (!best || seq.size() > best->size() || (seq.size() == best->size() && seq < *best)) best = seq;
        }
        if (best) {
            for (auto i : *best) used[i] = true;
            out.push_back(*best);
        }
    }
    return out;
}

std::vector<SwapEvent> random_swap_tx(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> len(0, 6), token(1, 4), pool(1, 4), amount(1, 1000), coin(0, 3);
    const int n = len(rng);
    std::vector<SwapEvent> out;
    std::uint64_t prev_out = static_cast<std::uint64_t>(token(rng));
    for (int i = 0; i < n; ++i) {
        std::uint64_t in = coin(rng) ? prev_out : static_cast<std::uint64_t>(token(rng));
        std::uint64_t out_tok = static_cast<std::uint64_t>(token(rng));
        if (out_tok == in) out_tok = in % 4 + 1;
        out.push_back(swap(9, static_cast<std::uint64_t>(i) * 3 + 1, static_cast<std::uint64_t>(pool(rng)), in, out_tok,
                           amount(rng), amount(rng)));
        prev_out = out_tok;
    }
    return out;
}

}  // namespace testing_support
