#include "mev/ingestion.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace mev {

// ----- JSON-RPC block parsing

namespace {

std::uint64_t quantity_field(const json& obj, const char* field) {
    auto it = obj.find(field);
    if (it == obj.end() || !it->is_string()) throw RpcError(std::string("missing quantity field '") + field + "'");
    return u64_from_quantity(it->get<std::string>());
}

std::string string_field(const json& obj, const char* field) {
    auto it = obj.find(field);
    if (it == obj.end() || !it->is_string()) throw RpcError(std::string("missing string field '") + field + "'");
    return it->get<std::string>();
}

LogRecord log_from_rpc(const json& j, std::uint64_t block_number) {
    if (j.contains("blockNumber") && j["blockNumber"].is_string() && quantity_field(j, "blockNumber") != block_number) {
        throw RpcError("log block number does not match block " + std::to_string(block_number));
    }
    LogRecord log;
    log.address = Address::from_hex(string_field(j, "address"));
    for (const auto& t : j.at("topics")) log.topics.push_back(Hash32::from_hex(t.get<std::string>()));
    log.data = from_hex(string_field(j, "data"));
    log.log_index = quantity_field(j, "logIndex");
    return log;
}

}  // namespace

BlockData block_from_rpc(const json& block, const json& receipts) {
    try {
        BlockData out;
        out.number = quantity_field(block, "number");
        out.timestamp = quantity_field(block, "timestamp");

        std::unordered_map<Hash32, const json*> receipt_by_hash;
        for (const auto& r : receipts) receipt_by_hash[Hash32::from_hex(string_field(r, "transactionHash"))] = &r;

        for (const auto& t : block.at("transactions")) {
            if (!t.is_object()) throw RpcError("block fetched without full transaction objects");
            TransactionRecord tx;
            tx.hash = Hash32::from_hex(string_field(t, "hash"));
            tx.index = quantity_field(t, "transactionIndex");
            tx.sender = Address::from_hex(string_field(t, "from"));
            if (auto to = t.find("to"); to != t.end() && to->is_string()) tx.recipient = Address::from_hex(to->get<std::string>());

            auto rit = receipt_by_hash.find(tx.hash);
            if (rit == receipt_by_hash.end()) throw RpcError("missing receipt for transaction " + tx.hash.hex());
            const json& receipt = *rit->second;
            tx.gas_used = quantity_field(receipt, "gasUsed");
            // Pre-Byzantium receipts carry no status; they only exist for successful execution paths.
            if (auto st = receipt.find("status"); st != receipt.end() && st->is_string()) {
                tx.status = u64_from_quantity(st->get<std::string>()) == 1 ? TxStatus::success : TxStatus::reverted;
            }
            if (tx.status == TxStatus::success) {
                for (const auto& l : receipt.at("logs")) tx.logs.push_back(log_from_rpc(l, out.number));
                std::sort(tx.logs.begin(), tx.logs.end(),
                          [](const LogRecord& a, const LogRecord& b) { return a.log_index < b.log_index; });
            }
            out.transactions.push_back(std::move(tx));
        }
        std::sort(out.transactions.begin(), out.transactions.end(),
                  [](const TransactionRecord& a, const TransactionRecord& b) { return a.index < b.index; });
        return out;
    } catch (const json::exception& e) {
        throw RpcError(std::string("malformed block response: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw RpcError(std::string("malformed block response: ") + e.what());
    }
}

// ----- RpcBlockSource

RpcBlockSource::RpcBlockSource(std::shared_ptr<RpcClient> client, RetryPolicy retry)
    : client_(std::move(client)), retry_(retry) {}

void RpcBlockSource::verify_chain_id(std::uint64_t expected) {
    const json r = with_retry(retry_, [&] { return client_->call("eth_chainId", json::array()); });
    const std::uint64_t actual = u64_from_quantity(r.get<std::string>());
    if (actual != expected) {
        throw ConfigError("endpoint reports chain id " + std::to_string(actual) + ", config expects " +
                          std::to_string(expected));
    }
}

std::uint64_t RpcBlockSource::head() {
    const json r = with_retry(retry_, [&] { return client_->call("eth_blockNumber", json::array()); });
    return u64_from_quantity(r.get<std::string>());
}

BlockData RpcBlockSource::fetch_once(std::uint64_t number) {
    ++attempts_;
    const std::string tag = u64_to_quantity(number);
    const json block = client_->call("eth_getBlockByNumber", json::array({tag, true}));
    if (block.is_null()) throw BlockNotFound(number);

    json receipts = json::array();
    bool have_receipts = false;
    if (block_receipts_supported_) {
        try {
            receipts = client_->call("eth_getBlockReceipts", json::array({tag}));
            have_receipts = receipts.is_array();
        } catch (const RpcResponseError& e) {
            if (e.code() != kMethodNotFound) throw;
            block_receipts_supported_ = false;
        }
    }
    if (!have_receipts) {
        receipts = json::array();
        for (const auto& t : block.at("transactions")) {
            json r = client_->call("eth_getTransactionReceipt", json::array({t.at("hash")}));
            if (r.is_null()) throw RpcError("receipt not available for " + t.at("hash").get<std::string>());
            receipts.push_back(std::move(r));
        }
    }
    return block_from_rpc(block, receipts);
}

BlockData RpcBlockSource::fetch_block(std::uint64_t number) {
    return with_retry(retry_, [&] { return fetch_once(number); });
}

// ----- FixtureBlockSource

FixtureBlockSource::FixtureBlockSource(std::vector<BlockData> blocks) {
    for (auto& b : blocks) blocks_.emplace(b.number, std::move(b));
}

BlockData FixtureBlockSource::fetch_block(std::uint64_t number) {
    auto it = blocks_.find(number);
    if (it == blocks_.end()) throw BlockNotFound(number);
    return it->second;
}

std::optional<std::pair<std::uint64_t, std::uint64_t>> FixtureBlockSource::range() const {
    if (blocks_.empty()) return std::nullopt;
    return std::make_pair(blocks_.begin()->first, blocks_.rbegin()->first);
}

// ----- streaming

void stream_blocks(BlockSource& source, std::uint64_t from, std::uint64_t to, unsigned parallelism,
                   const std::function<void(BlockData&&)>& consume) {
    ordered_parallel_for<BlockData>(
        from, to, parallelism, [&](std::uint64_t n) { return source.fetch_block(n); }, consume);
}

std::vector<BlockData> stream_blocks(BlockSource& source, std::uint64_t from, std::uint64_t to, unsigned parallelism) {
    std::vector<BlockData> out;
    stream_blocks(source, from, to, parallelism, [&](BlockData&& b) { out.push_back(std::move(b)); });
    return out;
}

// ----- fixtures

json block_to_json(const BlockData& block) {
    json txs = json::array();
    for (const auto& tx : block.transactions) {
        json logs = json::array();
        for (const auto& log : tx.logs) {
            json topics = json::array();
            for (const auto& t : log.topics) topics.push_back(t.hex());
            logs.push_back({{"address", log.address.hex()},
                            {"topics", std::move(topics)},
                            {"data", to_hex(log.data)},
                            {"log_index", log.log_index}});
        }
        txs.push_back({{"hash", tx.hash.hex()},
                       {"index", tx.index},
                       {"sender", tx.sender.hex()},
                       {"recipient", tx.recipient ? json(tx.recipient->hex()) : json(nullptr)},
                       {"gas_used", tx.gas_used},
                       {"status", tx.status == TxStatus::success ? "success" : "reverted"},
                       {"logs", std::move(logs)}});
    }
    return {{"number", block.number}, {"timestamp", block.timestamp}, {"transactions", std::move(txs)}};
}

BlockData block_from_json(const json& j) {
    BlockData b;
    b.number = j.at("number").get<std::uint64_t>();
    b.timestamp = j.at("timestamp").get<std::uint64_t>();
    for (const auto& t : j.at("transactions")) {
        TransactionRecord tx;
        tx.hash = Hash32::from_hex(t.at("hash").get<std::string>());
        tx.index = t.at("index").get<std::uint64_t>();
        tx.sender = Address::from_hex(t.at("sender").get<std::string>());
        if (const auto& r = t.at("recipient"); !r.is_null()) tx.recipient = Address::from_hex(r.get<std::string>());
        tx.gas_used = t.at("gas_used").get<std::uint64_t>();
        const auto status = t.at("status").get<std::string>();
        if (status == "success") {
            tx.status = TxStatus::success;
        } else if (status == "reverted") {
            tx.status = TxStatus::reverted;
        } else {
            throw std::invalid_argument("unknown transaction status '" + status + "'");
        }
        for (const auto& l : t.at("logs")) {
            LogRecord log;
            log.address = Address::from_hex(l.at("address").get<std::string>());
            for (const auto& topic : l.at("topics")) log.topics.push_back(Hash32::from_hex(topic.get<std::string>()));
            log.data = from_hex(l.at("data").get<std::string>());
            log.log_index = l.at("log_index").get<std::uint64_t>();
            tx.logs.push_back(std::move(log));
        }
        b.transactions.push_back(std::move(tx));
    }
    return b;
}

void record_fixture(const std::vector<BlockData>& blocks, std::uint64_t chain_id, const std::filesystem::path& path) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write fixture " + path.string());
        const json header = {{"format", kFixtureFormat}, {"version", kFixtureVersion}, {"chain_id", chain_id}};
        out << header.dump() << '\n';
        for (const auto& b : blocks) out << block_to_json(b).dump() << '\n';
        if (!out) throw Error("write failed for fixture " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

BlockFixture parse_fixture(std::istream& in) {
    BlockFixture fx;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::optional<std::uint64_t> last_number;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw FixtureError(line_no, std::string("parse error: ") + e.what());
        }
        if (!header_seen) {
            if (!j.is_object() || j.value("format", "") != kFixtureFormat) {
                throw FixtureError(line_no, "missing fixture header");
            }
            const int version = j.value("version", -1);
            if (version != kFixtureVersion) {
                throw FixtureError(line_no, "fixture version mismatch: file has " + std::to_string(version) +
                                                ", reader supports " + std::to_string(kFixtureVersion));
            }
            fx.chain_id = j.value("chain_id", std::uint64_t{0});
            header_seen = true;
            continue;
        }
        try {
            BlockData b = block_from_json(j);
            b.validate();
            if (last_number && b.number <= *last_number) throw std::invalid_argument("block numbers not ascending");
            last_number = b.number;
            fx.blocks.push_back(std::move(b));
        } catch (const FixtureError&) {
            throw;
        } catch (const std::exception& e) {
            throw FixtureError(line_no, e.what());
        }
    }
    return fx;
}

BlockFixture load_fixture(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open fixture " + path.string());
    return parse_fixture(in);
}

// ----- pool metadata

std::optional<PoolMetadata> PoolMetadataResolver::resolve(const Address& pool, PoolFamily family, std::uint64_t block) {
    {
        std::shared_lock lock(mutex_);
        if (auto it = cache_.find(pool); it != cache_.end()) return it->second;
    }
    std::optional<PoolMetadata> meta;
    auto t0 = contract::token0(reader_, pool, block);
    auto t1 = t0 ? contract::token1(reader_, pool, block) : std::nullopt;
    if (t0 && t1 && *t0 < *t1) {
        auto d0 = contract::decimals(reader_, *t0, block);
        auto d1 = d0 ? contract::decimals(reader_, *t1, block) : std::nullopt;
        if (d0 && d1 && *d0 <= 36 && *d1 <= 36) {
            meta = PoolMetadata{pool, *t0, *t1, *d0, *d1, family, std::nullopt};
            if (family == PoolFamily::v3) meta->fee_tier = contract::fee(reader_, pool, block);
        }
    }
    std::unique_lock lock(mutex_);
    return cache_.emplace(pool, meta).first->second;
}

std::size_t PoolMetadataResolver::unresolvable_count() const {
    std::shared_lock lock(mutex_);
    return static_cast<std::size_t>(std::count_if(cache_.begin(), cache_.end(), [](const auto& kv) { return !kv.second; }));
}

}  // namespace mev
