#pragma once

#include <condition_variable>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <thread>
#include <unordered_map>
#include <vector>

#include "mev/chain.hpp"
#include "mev/decoder.hpp"
#include "mev/rpc.hpp"
#include "mev/state_reader.hpp"

namespace mev {

class BlockSource {
public:
    virtual ~BlockSource() = default;
    /// Throws BlockNotFound past the head, RpcError/FetchError on transport failure.
    virtual BlockData fetch_block(std::uint64_t number) = 0;
};

/// Blocks over JSON-RPC: eth_getBlockByNumber with full transactions plus one
/// eth_getBlockReceipts call, falling back to per-transaction receipts when the node lacks it.
/// Each fetch is retried as a whole under the config's retry policy.
class RpcBlockSource final : public BlockSource {
public:
    RpcBlockSource(std::shared_ptr<RpcClient> client, RetryPolicy retry);
    BlockData fetch_block(std::uint64_t number) override;

    /// Throws ConfigError when eth_chainId disagrees with `expected`.
    void verify_chain_id(std::uint64_t expected);
    std::uint64_t head();
    std::uint64_t fetch_attempts() const { return attempts_.load(); }

private:
    BlockData fetch_once(std::uint64_t number);

    std::shared_ptr<RpcClient> client_;
    RetryPolicy retry_;
    std::atomic<bool> block_receipts_supported_{true};
    std::atomic<std::uint64_t> attempts_{0};
};

/// Serves blocks from memory (a loaded fixture).
class FixtureBlockSource final : public BlockSource {
public:
    explicit FixtureBlockSource(std::vector<BlockData> blocks);
    BlockData fetch_block(std::uint64_t number) override;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> range() const;

private:
    std::map<std::uint64_t, BlockData> blocks_;
};

/// Builds a BlockData from eth_getBlockByNumber and receipt JSON objects.
BlockData block_from_rpc(const json& block, const json& receipts);

/// Runs `produce(n)` for every n in [from, to] on up to `parallelism` worker threads and hands
/// the results to `consume` on the calling thread in ascending order. Workers stay within a
/// window of `parallelism` blocks ahead of the consumer. The first failure (from either side)
/// stops new work; results before the failing number are still delivered, then the exception
/// is rethrown wrapped as FetchError carrying that number.
template <typename T>
void ordered_parallel_for(std::uint64_t from, std::uint64_t to, unsigned parallelism,
                          const std::function<T(std::uint64_t)>& produce, const std::function<void(T&&)>& consume);

/// Ordered, exactly-once delivery of [from, to] with at most `parallelism` fetches in flight.
void stream_blocks(BlockSource& source, std::uint64_t from, std::uint64_t to, unsigned parallelism,
                   const std::function<void(BlockData&&)>& consume);
std::vector<BlockData> stream_blocks(BlockSource& source, std::uint64_t from, std::uint64_t to, unsigned parallelism);

// ----- fixtures

inline constexpr int kFixtureVersion = 1;
inline constexpr std::string_view kFixtureFormat = "mevinspect-blocks";

struct BlockFixture {
    std::uint64_t chain_id = 0;
    std::vector<BlockData> blocks;
};

json block_to_json(const BlockData& block);
BlockData block_from_json(const json& j);

/// One header line then one block per line; written atomically (temp file + rename).
void record_fixture(const std::vector<BlockData>& blocks, std::uint64_t chain_id, const std::filesystem::path& path);
/// Throws FixtureError naming the offending line. An empty file yields an empty fixture.
BlockFixture load_fixture(const std::filesystem::path& path);
BlockFixture parse_fixture(std::istream& in);

// ----- pool metadata

/// token0/token1/decimals (and fee for V3) via eth_call, cached per pool address including
/// failures. Safe for concurrent use.
class PoolMetadataResolver final : public PoolMetadataSource {
public:
    explicit PoolMetadataResolver(StateReader& reader) : reader_(reader) {}
    std::optional<PoolMetadata> resolve(const Address& pool, PoolFamily family, std::uint64_t block) override;

    std::size_t unresolvable_count() const;

private:
    StateReader& reader_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<Address, std::optional<PoolMetadata>> cache_;
};

// ----- template implementation

template <typename T>
void ordered_parallel_for(std::uint64_t from, std::uint64_t to, unsigned parallelism,
                          const std::function<T(std::uint64_t)>& produce, const std::function<void(T&&)>& consume) {
    if (from > to) throw PreconditionError("empty range: from " + std::to_string(from) + " > to " + std::to_string(to));
    if (parallelism < 1) parallelism = 1;

    std::mutex m;
    std::condition_variable cv;
    std::map<std::uint64_t, T> ready;
    std::uint64_t next_issue = from;
    std::uint64_t next_deliver = from;
    std::optional<std::uint64_t> failed_at;
    std::exception_ptr failure;
    bool consumer_stopped = false;

    auto worker = [&] {
        for (;;) {
            std::uint64_t n;
            {
                std::unique_lock lock(m);
                cv.wait(lock, [&] {
                    return consumer_stopped || failed_at || next_issue > to || next_issue < next_deliver + parallelism;
                });
                if (consumer_stopped || failed_at || next_issue > to) return;
                n = next_issue++;
            }
            try {
                T value = produce(n);
                std::lock_guard lock(m);
                ready.emplace(n, std::move(value));
            } catch (...) {
                std::lock_guard lock(m);
                if (!failed_at || n < *failed_at) {
                    failed_at = n;
                    failure = std::current_exception();
                }
            }
            cv.notify_all();
        }
    };

    std::vector<std::thread> threads;
    const auto span = to - from + 1;
    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(parallelism, span));
    threads.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) threads.emplace_back(worker);

    std::exception_ptr consumer_error;
    std::uint64_t consumer_error_at = 0;
    for (;;) {
        T value;
        {
            std::unique_lock lock(m);
            cv.wait(lock, [&] { return ready.contains(next_deliver) || (failed_at && *failed_at == next_deliver); });
            if (!ready.contains(next_deliver)) break;  // failure at the next number
            auto node = ready.extract(next_deliver);
            value = std::move(node.mapped());
        }
        try {
            consume(std::move(value));
        } catch (...) {
            consumer_error = std::current_exception();
            consumer_error_at = next_deliver;
            std::lock_guard lock(m);
            consumer_stopped = true;
            cv.notify_all();
            break;
        }
        std::lock_guard lock(m);
        ++next_deliver;
        cv.notify_all();
        if (next_deliver > to) break;
    }
    {
        std::lock_guard lock(m);
        consumer_stopped = true;
    }
    cv.notify_all();
    for (auto& t : threads) t.join();

    auto rethrow_as_fetch_error = [](std::exception_ptr e, std::uint64_t n) {
        try {
            std::rethrow_exception(e);
        } catch (const FetchError&) {
            throw;
        } catch (const std::exception& ex) {
            throw FetchError(n, ex.what());
        }
    };
    if (consumer_error) rethrow_as_fetch_error(consumer_error, consumer_error_at);
    if (failed_at && next_deliver <= to) rethrow_as_fetch_error(failure, *failed_at);
}

}  // namespace mev
