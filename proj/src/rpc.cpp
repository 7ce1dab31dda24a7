#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "mev/rpc.hpp"

#include <mutex>
#include <vector>

#include "mev/simulated_node.hpp"

namespace mev {

struct HttpTransport::Impl {
    std::string origin;  // scheme://host[:port]
    std::string path;
    std::mutex mutex;
    std::vector<std::unique_ptr<httplib::Client>> idle;

    std::unique_ptr<httplib::Client> acquire() {
        {
            std::lock_guard lock(mutex);
            if (!idle.empty()) {
                auto c = std::move(idle.back());
                idle.pop_back();
                return c;
            }
        }
        auto c = std::make_unique<httplib::Client>(origin);
        c->set_connection_timeout(std::chrono::seconds(5));
        c->set_read_timeout(std::chrono::seconds(60));
        c->set_keep_alive(true);
        return c;
    }

    void release(std::unique_ptr<httplib::Client> c) {
        std::lock_guard lock(mutex);
        idle.push_back(std::move(c));
    }
};

HttpTransport::HttpTransport(std::string url) : impl_(std::make_unique<Impl>()) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("rpc endpoint must be an http(s) URL: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    impl_->origin = url.substr(0, path_start);
    impl_->path = path_start == std::string::npos ? "/" : url.substr(path_start);
}

HttpTransport::~HttpTransport() = default;

json HttpTransport::send(const json& request) {
    auto client = impl_->acquire();
    auto res = client->Post(impl_->path, request.dump(), "application/json");
    if (!res) throw RpcError("rpc unreachable: " + httplib::to_string(res.error()));
    if (res->status == 429 || res->status >= 500) {
        throw RpcError("rpc http status " + std::to_string(res->status));
    }
    impl_->release(std::move(client));
    try {
        return json::parse(res->body);
    } catch (const json::exception& e) {
        throw RpcError(std::string("malformed rpc response: ") + e.what());
    }
}

std::shared_ptr<RpcTransport> make_transport(const std::string& endpoint, const std::filesystem::path& base_dir) {
    constexpr std::string_view kFixtureScheme = "fixture:";
    if (endpoint.starts_with(kFixtureScheme)) {
        std::filesystem::path state = endpoint.substr(kFixtureScheme.size());
        if (state.is_relative()) state = base_dir / state;
        return std::make_shared<SimulatedNode>(load_chain_fixture(state));
    }
    if (endpoint.starts_with("http://") || endpoint.starts_with("https://")) {
        return std::make_shared<HttpTransport>(endpoint);
    }
    throw ConfigError("unsupported rpc endpoint '" + endpoint + "' (expected http(s):// or fixture:)");
}

json RpcClient::call(std::string_view method, json params) {
    const std::uint64_t id = next_id_.fetch_add(1);
    json request = {{"jsonrpc", "2.0"}, {"id", id}, {"method", method}, {"params", std::move(params)}};
    ++requests_;
    const json response = transport_->send(request);
    if (!response.is_object()) throw RpcError("rpc response is not an object");
    if (auto err = response.find("error"); err != response.end() && !err->is_null()) {
        const int code = err->value("code", 0);
        const std::string message = err->value("message", std::string("unknown error"));
        throw RpcResponseError(code, message);
    }
    auto result = response.find("result");
    if (result == response.end()) throw RpcError("rpc response has neither result nor error");
    return *result;
}

bool is_retriable(const std::exception& e) {
    if (const auto* resp = dynamic_cast<const RpcResponseError*>(&e)) {
        return resp->code() == -32005 || resp->code() == -32603;
    }
    return dynamic_cast<const RpcError*>(&e) != nullptr;
}

}  // namespace mev
