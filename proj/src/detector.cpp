#include "mev/detector.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

namespace mev {

namespace {

using Path = std::vector<std::size_t>;

// Longer wins; equal length falls back to the smaller index sequence.
bool better(const Path& candidate, const std::optional<Path>& incumbent) {
    if (!incumbent) return true;
    if (candidate.size() != incumbent->size()) return candidate.size() > incumbent->size();
    return candidate < *incumbent;
}

// Longest cycle starting at `start` through unused swaps. best[j][m] is the best path from
// `start` to j, with m set once the path has left the start's pool.
std::optional<Path> longest_cycle_from(std::span<const SwapEvent> swaps, const std::vector<bool>& used,
                                       std::size_t start) {
    const std::size_t n = swaps.size();
    std::vector<std::array<std::optional<Path>, 2>> best(n);
    best[start][0] = Path{start};
    const Address& start_pool = swaps[start].pool;

    for (std::size_t j = start + 1; j < n; ++j) {
        if (used[j]) continue;
        const bool leaves_pool = swaps[j].pool != start_pool;
        for (std::size_t i = start; i < j; ++i) {
            if (swaps[i].token_out != swaps[j].token_in || swaps[i].log_index >= swaps[j].log_index) continue;
            for (int m = 0; m < 2; ++m) {
                if (!best[i][m]) continue;
                Path candidate = *best[i][m];
                candidate.push_back(j);
                auto& slot = best[j][(m != 0 || leaves_pool) ? 1 : 0];
                if (better(candidate, slot)) slot = std::move(candidate);
            }
        }
    }

    std::optional<Path> cycle;
    for (std::size_t j = start + 1; j < n; ++j) {
        if (best[j][1] && swaps[j].token_out == swaps[start].token_in && better(*best[j][1], cycle)) {
            cycle = best[j][1];
        }
    }
    return cycle;
}

using SwapKey = std::pair<Hash32, std::uint64_t>;

SwapKey key_of(const SwapEvent& s) { return {s.tx_hash, s.log_index}; }

}  // namespace

std::vector<Arbitrage> detect_arbitrages(std::span<const SwapEvent> tx_swaps) {
    std::vector<SwapEvent> swaps(tx_swaps.begin(), tx_swaps.end());
    std::stable_sort(swaps.begin(), swaps.end(),
                     [](const SwapEvent& a, const SwapEvent& b) { return a.log_index < b.log_index; });

    std::vector<Arbitrage> out;
    std::vector<bool> used(swaps.size(), false);
    for (std::size_t s = 0; s < swaps.size(); ++s) {
        if (used[s]) continue;
        auto cycle = longest_cycle_from(swaps, used, s);
        if (!cycle) continue;

        Arbitrage arb;
        arb.tx_hash = swaps[s].tx_hash;
        arb.block_number = swaps[s].block_number;
        arb.tx_index = swaps[s].tx_index;
        for (auto idx : *cycle) {
            used[idx] = true;
            arb.path.push_back(swaps[idx]);
        }
        arb.profit_token = arb.path.front().token_in;
        arb.start_amount = arb.path.front().amount_in;
        arb.end_amount = arb.path.back().amount_out;
        arb.profit_raw = signed_diff(arb.end_amount, arb.start_amount);
        out.push_back(std::move(arb));
    }
    return out;
}

std::vector<Sandwich> detect_sandwiches(const ClassifiedBlock& block, std::span<const SwapEvent> claimed) {
    std::set<SwapKey> taken;
    for (const auto& s : claimed) taken.insert(key_of(s));

    // Per pool, in (tx index, log index) order.
    std::map<Address, std::vector<const SwapEvent*>> by_pool;
    for (const auto& tx : block.transactions) {
        for (const auto& s : tx.swaps) {
            if (!taken.contains(key_of(s))) by_pool[s.pool].push_back(&s);
        }
    }

    std::vector<Sandwich> out;
    for (auto& [pool, swaps] : by_pool) {
        std::vector<bool> used(swaps.size(), false);
        for (std::size_t a = 0; a < swaps.size(); ++a) {
            if (used[a]) continue;
            const SwapEvent& front = *swaps[a];
            for (std::size_t c = a + 1; c < swaps.size(); ++c) {
                if (used[c]) continue;
                const SwapEvent& back = *swaps[c];
                const bool closes = back.tx_index > front.tx_index && back.initiator == front.initiator &&
                                    back.token_in == front.token_out && back.token_out == front.token_in;
                if (!closes) continue;

                std::vector<std::size_t> victims;
                for (std::size_t k = a + 1; k < c; ++k) {
                    const SwapEvent& v = *swaps[k];
                    if (!used[k] && v.tx_index > front.tx_index && v.tx_index < back.tx_index &&
                        v.token_in == front.token_in && v.token_out == front.token_out &&
                        v.initiator != front.initiator) {
                        victims.push_back(k);
                    }
                }
                // The first closing swap ends the position whether or not anyone was sandwiched.
                if (!victims.empty()) {
                    Sandwich sw;
                    sw.block_number = block.block_number;
                    sw.frontrun = front;
                    sw.backrun = back;
                    for (auto k : victims) {
                        sw.victims.push_back(*swaps[k]);
                        used[k] = true;
                    }
                    sw.profit_token = front.token_in;
                    sw.profit_raw = signed_diff(back.amount_out, front.amount_in);
                    used[a] = used[c] = true;
                    out.push_back(std::move(sw));
                }
                break;
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Sandwich& x, const Sandwich& y) {
        return std::tie(x.frontrun.tx_index, x.frontrun.log_index) < std::tie(y.frontrun.tx_index, y.frontrun.log_index);
    });
    return out;
}

std::vector<LiquidationEvent> extract_liquidations(const ClassifiedBlock& block) {
    std::vector<LiquidationEvent> out;
    for (const auto& tx : block.transactions) out.insert(out.end(), tx.liquidations.begin(), tx.liquidations.end());
    return out;
}

MevFindings inspect_block(const ClassifiedBlock& block, const ChainConfig& cfg) {
    MevFindings f;
    f.block_number = block.block_number;
    f.timestamp = block.timestamp;
    f.diagnostics = block.diagnostics;

    std::vector<SwapEvent> claimed;
    for (const auto& tx : block.transactions) {
        for (auto& arb : detect_arbitrages(tx.swaps)) {
            claimed.insert(claimed.end(), arb.path.begin(), arb.path.end());
            f.arbitrages.push_back(std::move(arb));
        }
    }
    if (cfg.sandwiches_possible) f.sandwiches = detect_sandwiches(block, claimed);
    f.liquidations = extract_liquidations(block);
    return f;
}

}  // namespace mev
