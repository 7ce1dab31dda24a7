#include "mev/chain.hpp"

#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "mev/errors.hpp"

namespace mev {

std::string_view to_string(PoolFamily f) { return f == PoolFamily::v2 ? "v2" : "v3"; }

PoolFamily pool_family_from_string(std::string_view s) {
    if (s == "v2") return PoolFamily::v2;
    if (s == "v3") return PoolFamily::v3;
    throw ConfigError("unknown pool family '" + std::string(s) + "' (expected v2 or v3)");
}

std::chrono::milliseconds RetryPolicy::delay_before(unsigned attempt) const {
    auto delay = base_delay;
    for (unsigned i = 1; i < attempt; ++i) delay *= factor;
    return delay;
}

void ChainConfig::validate() const {
    if (usdc_token == native_wrapped_token) throw ConfigError("usdc_token must differ from native_wrapped_token");
    if (blocks_per_batch < 1) throw ConfigError("blocks_per_batch must be >= 1");
    if (max_parallel_requests < 1) throw ConfigError("max_parallel_requests must be >= 1");
    if (retry.attempts < 1) throw ConfigError("retry.attempts must be >= 1");
    for (const auto& f : dex_factories) {
        if (f.family == PoolFamily::v3 && f.fee_tiers.empty()) {
            throw ConfigError("v3 factory " + f.address.hex() + " needs at least one fee tier");
        }
    }
}

std::string ChainConfig::token_label(const Address& token) const {
    auto it = token_labels.find(token);
    return it == token_labels.end() ? token.hex() : it->second;
}

namespace {

Address parse_address(const YAML::Node& node, const char* field) {
    try {
        return Address::from_hex(node.as<std::string>());
    } catch (const std::exception& e) {
        throw ConfigError(std::string("field '") + field + "': " + e.what());
    }
}

template <typename T>
T required(const YAML::Node& root, const char* field) {
    const YAML::Node n = root[field];
    if (!n) throw ConfigError(std::string("missing required field '") + field + "'");
    try {
        return n.as<T>();
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("field '") + field + "': " + e.what());
    }
}

}  // namespace

ChainConfig parse_chain_config(std::string_view yaml_text, const std::filesystem::path& base_dir) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("invalid YAML: ") + e.what());
    }
    if (!root.IsMap()) throw ConfigError("config must be a mapping");

    ChainConfig cfg;
    cfg.base_dir = base_dir;
    cfg.chain_id = required<std::uint64_t>(root, "chain_id");
    cfg.name = root["name"] ? root["name"].as<std::string>() : std::string{};
    cfg.rpc_endpoint = required<std::string>(root, "rpc_endpoint");
    if (!root["native_wrapped_token"]) throw ConfigError("missing required field 'native_wrapped_token'");
    if (!root["usdc_token"]) throw ConfigError("missing required field 'usdc_token'");
    cfg.native_wrapped_token = parse_address(root["native_wrapped_token"], "native_wrapped_token");
    cfg.usdc_token = parse_address(root["usdc_token"], "usdc_token");
    cfg.sandwiches_possible = required<bool>(root, "sandwiches_possible");
    if (root["blocks_per_batch"]) cfg.blocks_per_batch = root["blocks_per_batch"].as<std::uint64_t>();
    if (root["max_parallel_requests"]) cfg.max_parallel_requests = root["max_parallel_requests"].as<unsigned>();
    if (root["native_hop_pricing"]) cfg.native_hop_pricing = root["native_hop_pricing"].as<bool>();

    if (const auto retry = root["retry"]) {
        if (retry["attempts"]) cfg.retry.attempts = retry["attempts"].as<unsigned>();
        if (retry["base_delay_ms"]) cfg.retry.base_delay = std::chrono::milliseconds(retry["base_delay_ms"].as<long>());
        if (retry["factor"]) cfg.retry.factor = retry["factor"].as<unsigned>();
    }

    if (const auto factories = root["dex_factories"]) {
        for (const auto& f : factories) {
            DexFactory factory;
            factory.address = parse_address(f["address"], "dex_factories.address");
            factory.family = pool_family_from_string(required<std::string>(f, "family"));
            if (f["fee_tiers"]) factory.fee_tiers = f["fee_tiers"].as<std::vector<std::uint32_t>>();
            if (f["label"]) factory.label = f["label"].as<std::string>();
            cfg.dex_factories.push_back(std::move(factory));
        }
    }
    if (const auto ext = root["registry_extensions"]) {
        for (const auto& p : ext) {
            std::filesystem::path path = p.as<std::string>();
            cfg.registry_extensions.push_back(path.is_relative() ? base_dir / path : path);
        }
    }
    if (const auto labels = root["token_labels"]) {
        for (const auto& kv : labels) {
            cfg.token_labels[parse_address(kv.first, "token_labels")] = kv.second.as<std::string>();
        }
    }
    cfg.validate();
    return cfg;
}

ChainConfig load_chain_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_chain_config(ss.str(), path.parent_path());
}

std::string dump_chain_config(const ChainConfig& cfg) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "chain_id" << YAML::Value << cfg.chain_id;
    if (!cfg.name.empty()) out << YAML::Key << "name" << YAML::Value << cfg.name;
    out << YAML::Key << "rpc_endpoint" << YAML::Value << cfg.rpc_endpoint;
    out << YAML::Key << "native_wrapped_token" << YAML::Value << cfg.native_wrapped_token.hex();
    out << YAML::Key << "usdc_token" << YAML::Value << cfg.usdc_token.hex();
    out << YAML::Key << "sandwiches_possible" << YAML::Value << cfg.sandwiches_possible;
    out << YAML::Key << "blocks_per_batch" << YAML::Value << cfg.blocks_per_batch;
    out << YAML::Key << "max_parallel_requests" << YAML::Value << cfg.max_parallel_requests;
    out << YAML::Key << "native_hop_pricing" << YAML::Value << cfg.native_hop_pricing;
    out << YAML::Key << "retry" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "attempts" << YAML::Value << cfg.retry.attempts;
    out << YAML::Key << "base_delay_ms" << YAML::Value << cfg.retry.base_delay.count();
    out << YAML::Key << "factor" << YAML::Value << cfg.retry.factor;
    out << YAML::EndMap;
    out << YAML::Key << "dex_factories" << YAML::Value << YAML::BeginSeq;
    for (const auto& f : cfg.dex_factories) {
        out << YAML::BeginMap;
        out << YAML::Key << "address" << YAML::Value << f.address.hex();
        out << YAML::Key << "family" << YAML::Value << std::string(to_string(f.family));
        if (!f.fee_tiers.empty()) out << YAML::Key << "fee_tiers" << YAML::Value << YAML::Flow << f.fee_tiers;
        if (!f.label.empty()) out << YAML::Key << "label" << YAML::Value << f.label;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    if (!cfg.token_labels.empty()) {
        out << YAML::Key << "token_labels" << YAML::Value << YAML::BeginMap;
        for (const auto& [addr, label] : cfg.token_labels) out << YAML::Key << addr.hex() << YAML::Value << label;
        out << YAML::EndMap;
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

void BlockData::validate() const {
    for (std::size_t i = 0; i < transactions.size(); ++i) {
        const auto& tx = transactions[i];
        if (i > 0 && tx.index <= transactions[i - 1].index) {
            throw PreconditionError("block " + std::to_string(number) + ": transaction indices not strictly increasing at " +
                                    std::to_string(tx.index));
        }
        if (tx.status == TxStatus::reverted && !tx.logs.empty()) {
            throw PreconditionError("block " + std::to_string(number) + ": reverted transaction " + tx.hash.hex() +
                                    " carries logs");
        }
        for (std::size_t j = 0; j < tx.logs.size(); ++j) {
            if (j > 0 && tx.logs[j].log_index <= tx.logs[j - 1].log_index) {
                throw PreconditionError("block " + std::to_string(number) + ": log indices not strictly increasing in " +
                                        tx.hash.hex());
            }
            if (tx.logs[j].topics.size() > 4) {
                throw PreconditionError("block " + std::to_string(number) + ": log with more than 4 topics");
            }
        }
    }
}

}  // namespace mev
