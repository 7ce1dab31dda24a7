#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <string_view>
#include <thread>

#include <nlohmann/json.hpp>

#include "mev/chain.hpp"
#include "mev/errors.hpp"

namespace mev {

using json = nlohmann::json;

/// Sends one JSON-RPC request object and returns the response object.
/// Implementations must be safe to call from several threads.
class RpcTransport {
public:
    virtual ~RpcTransport() = default;
    virtual json send(const json& request) = 0;
};

/// JSON-RPC over HTTP(S) POST. Keeps a small pool of keep-alive connections.
class HttpTransport final : public RpcTransport {
public:
    explicit HttpTransport(std::string url);
    ~HttpTransport() override;
    json send(const json& request) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Resolves an endpoint string: "http(s)://..." or "fixture:<state file>" (a SimulatedNode).
std::shared_ptr<RpcTransport> make_transport(const std::string& endpoint, const std::filesystem::path& base_dir = {});

class RpcClient {
public:
    explicit RpcClient(std::shared_ptr<RpcTransport> transport) : transport_(std::move(transport)) {}

    /// Returns the "result" member. Throws RpcResponseError for an "error" member and
    /// RpcError for transport failures or malformed responses.
    json call(std::string_view method, json params);

    std::uint64_t requests_sent() const { return requests_.load(); }

private:
    std::shared_ptr<RpcTransport> transport_;
    std::atomic<std::uint64_t> requests_{0};
    std::atomic<std::uint64_t> next_id_{1};
};

// JSON-RPC error codes we treat specially.
inline constexpr int kMethodNotFound = -32601;
inline constexpr int kExecutionReverted = 3;

/// True for failures worth retrying: transport errors, rate limits, internal node errors.
bool is_retriable(const std::exception& e);

/// Runs `fn` until it succeeds or the policy's attempts are exhausted, sleeping with
/// exponential backoff between attempts. Non-retriable exceptions propagate at once.
template <typename F>
auto with_retry(const RetryPolicy& policy, F&& fn) -> decltype(fn()) {
    for (unsigned attempt = 1;; ++attempt) {
        try {
            return fn();
        } catch (const std::exception& e) {
            if (!is_retriable(e) || attempt >= policy.attempts) throw;
        }
        std::this_thread::sleep_for(policy.delay_before(attempt));
    }
}

}  // namespace mev
