#include "mev/storage.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mev/keccak.hpp"

namespace mev {

namespace {

class Statement {
public:
    Statement(sqlite3* db, const char* sql) : db_(db) {
        if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
            throw StorageError(std::string("prepare failed: ") + sqlite3_errmsg(db));
        }
    }
    ~Statement() { sqlite3_finalize(stmt_); }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;

    Statement& bind(int i, std::int64_t v) {
        check(sqlite3_bind_int64(stmt_, i, v));
        return *this;
    }
    Statement& bind(int i, std::uint64_t v) { return bind(i, static_cast<std::int64_t>(v)); }
    Statement& bind(int i, const std::string& v) {
        check(sqlite3_bind_text(stmt_, i, v.c_str(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
        return *this;
    }
    Statement& bind_null(int i) {
        check(sqlite3_bind_null(stmt_, i));
        return *this;
    }

    /// True while rows remain.
    bool step() {
        const int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW) return true;
        if (rc == SQLITE_DONE) return false;
        throw StorageError(std::string("step failed: ") + sqlite3_errmsg(db_));
    }
    void run() {
        step();
        sqlite3_reset(stmt_);
        sqlite3_clear_bindings(stmt_);
    }

    std::int64_t int_col(int i) const { return sqlite3_column_int64(stmt_, i); }
    bool is_null(int i) const { return sqlite3_column_type(stmt_, i) == SQLITE_NULL; }
    std::string text_col(int i) const {
        const auto* p = sqlite3_column_text(stmt_, i);
        return p ? std::string(reinterpret_cast<const char*>(p), static_cast<std::size_t>(sqlite3_column_bytes(stmt_, i)))
                 : std::string{};
    }

private:
    void check(int rc) {
        if (rc != SQLITE_OK) throw StorageError(std::string("bind failed: ") + sqlite3_errmsg(db_));
    }
    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

void exec(sqlite3* db, const char* sql) {
    char* err = nullptr;
    if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : "unknown error";
        sqlite3_free(err);
        throw StorageError("sqlite: " + msg);
    }
}

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS meta (key TEXT PRIMARY KEY, value TEXT NOT NULL);
CREATE TABLE IF NOT EXISTS blocks (
    chain_id INTEGER NOT NULL,
    block INTEGER NOT NULL,
    timestamp INTEGER NOT NULL,
    tx_count INTEGER NOT NULL,
    diagnostics TEXT NOT NULL,
    findings TEXT NOT NULL,
    content_hash TEXT NOT NULL,
    PRIMARY KEY (chain_id, block)
);
CREATE TABLE IF NOT EXISTS records (
    chain_id INTEGER NOT NULL,
    tx_hash TEXT NOT NULL,
    ordinal INTEGER NOT NULL,
    block INTEGER NOT NULL,
    tx_index INTEGER NOT NULL,
    timestamp INTEGER NOT NULL,
    day_utc TEXT NOT NULL,
    kind TEXT NOT NULL,
    profit_token TEXT NOT NULL,
    profit_raw TEXT NOT NULL,
    usd_profit TEXT,
    route TEXT NOT NULL,
    path_length INTEGER NOT NULL,
    PRIMARY KEY (chain_id, tx_hash, ordinal)
);
CREATE INDEX IF NOT EXISTS records_by_block ON records (chain_id, block, tx_index, ordinal);
INSERT OR IGNORE INTO meta (key, value) VALUES ('schema_version', '1');
)sql";

json diagnostics_to_json(const DecodeDiagnostics& d) {
    return {{"total_logs", d.total_logs},
            {"decoded", d.decoded},
            {"ignored_unregistered", d.ignored_unregistered},
            {"malformed", d.malformed},
            {"unresolved_pool_swaps", d.unresolved_pool_swaps},
            {"reverted_transactions", d.reverted_transactions}};
}

DecodeDiagnostics diagnostics_from_json(const json& j) {
    DecodeDiagnostics d;
    d.total_logs = j.at("total_logs").get<std::uint64_t>();
    d.decoded = j.at("decoded").get<std::uint64_t>();
    d.ignored_unregistered = j.at("ignored_unregistered").get<std::uint64_t>();
    d.malformed = j.at("malformed").get<std::uint64_t>();
    d.unresolved_pool_swaps = j.at("unresolved_pool_swaps").get<std::uint64_t>();
    d.reverted_transactions = j.at("reverted_transactions").get<std::uint64_t>();
    return d;
}

json swap_to_json(const SwapEvent& s) {
    return {{"tx_hash", s.tx_hash.hex()},     {"tx_index", s.tx_index},       {"log_index", s.log_index},
            {"pool", s.pool.hex()},           {"token_in", s.token_in.hex()}, {"token_out", s.token_out.hex()},
            {"amount_in", to_dec(s.amount_in)}, {"amount_out", to_dec(s.amount_out)}, {"initiator", s.initiator.hex()},
            {"recipient", s.recipient.hex()}};
}

json record_to_json(const PricedMevRecord& r, std::uint64_t chain_id) {
    return {{"chain_id", chain_id},
            {"block", r.block_number},
            {"day_utc", r.day},
            {"tx_hash", r.tx_hash.hex()},
            {"tx_index", r.tx_index},
            {"ordinal", r.ordinal},
            {"kind", to_string(r.kind)},
            {"profit_token", r.profit_token.hex()},
            {"profit_raw", to_dec(r.profit_raw)},
            {"usd_profit", r.usd_profit ? json(r.usd_profit->str()) : json(nullptr)},
            {"route", to_string(r.route)},
            {"path_length", r.path_length}};
}

void sort_records(std::vector<PricedMevRecord>& records) {
    std::sort(records.begin(), records.end(), [](const PricedMevRecord& a, const PricedMevRecord& b) {
        return std::tie(a.block_number, a.tx_index, a.ordinal, a.tx_hash) <
               std::tie(b.block_number, b.tx_index, b.ordinal, b.tx_hash);
    });
}

}  // namespace

json findings_to_json(const MevFindings& f) {
    json arbs = json::array();
    for (const auto& a : f.arbitrages) {
        json path = json::array();
        for (const auto& s : a.path) path.push_back(swap_to_json(s));
        arbs.push_back({{"tx_hash", a.tx_hash.hex()},
                        {"profit_token", a.profit_token.hex()},
                        {"start_amount", to_dec(a.start_amount)},
                        {"end_amount", to_dec(a.end_amount)},
                        {"profit_raw", to_dec(a.profit_raw)},
                        {"path", std::move(path)}});
    }
    json sandwiches = json::array();
    for (const auto& s : f.sandwiches) {
        json victims = json::array();
        for (const auto& v : s.victims) victims.push_back(swap_to_json(v));
        sandwiches.push_back({{"frontrun", swap_to_json(s.frontrun)},
                              {"victims", std::move(victims)},
                              {"backrun", swap_to_json(s.backrun)},
                              {"profit_token", s.profit_token.hex()},
                              {"profit_raw", to_dec(s.profit_raw)}});
    }
    json liquidations = json::array();
    for (const auto& l : f.liquidations) {
        liquidations.push_back({{"tx_hash", l.tx_hash.hex()},
                                {"log_index", l.log_index},
                                {"protocol", l.protocol},
                                {"liquidator", l.liquidator.hex()},
                                {"borrower", l.borrower.hex()},
                                {"debt_token", l.debt_token.hex()},
                                {"debt_repaid", to_dec(l.debt_repaid)},
                                {"collateral_token", l.collateral_token.hex()},
                                {"collateral_seized", to_dec(l.collateral_seized)}});
    }
    return {{"arbitrages", std::move(arbs)}, {"sandwiches", std::move(sandwiches)}, {"liquidations", std::move(liquidations)}};
}

std::string describe(const std::vector<BlockInterval>& gaps) {
    std::ostringstream os;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        if (i > 0) os << ", ";
        os << gaps[i].from;
        if (gaps[i].to != gaps[i].from) os << '-' << gaps[i].to;
    }
    return os.str();
}

Store::Store(const std::filesystem::path& path) {
    if (sqlite3_open_v2(path.c_str(), &db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX, nullptr) !=
        SQLITE_OK) {
        std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
        sqlite3_close(db_);
        db_ = nullptr;
        throw StorageError("cannot open store " + path.string() + ": " + msg);
    }
    sqlite3_busy_timeout(db_, 5000);
    try {
        exec(db_, kSchema);
    } catch (...) {
        sqlite3_close(db_);
        db_ = nullptr;
        throw;
    }
}

Store::~Store() {
    if (db_) sqlite3_close(db_);
}

void Store::persist_block_findings(std::uint64_t chain_id, const BlockCoverage& block, const MevFindings& findings,
                                   const std::vector<PricedMevRecord>& records) {
    if (findings.block_number != block.block) {
        throw PreconditionError("findings belong to block " + std::to_string(findings.block_number) + ", not " +
                                std::to_string(block.block));
    }
    for (const auto& r : records) {
        if (r.block_number != block.block) {
            throw PreconditionError("record for block " + std::to_string(r.block_number) + " persisted under block " +
                                    std::to_string(block.block));
        }
    }

    std::vector<PricedMevRecord> sorted = records;
    sort_records(sorted);
    const std::string diagnostics = diagnostics_to_json(block.diagnostics).dump();
    const std::string findings_text = findings_to_json(findings).dump();
    json content = {{"timestamp", block.timestamp}, {"tx_count", block.tx_count}, {"diagnostics", diagnostics},
                    {"findings", findings_text}, {"records", json::array()}};
    for (const auto& r : sorted) content["records"].push_back(record_to_json(r, chain_id));
    const std::string content_hash = keccak256(content.dump()).hex();

    {
        Statement existing(db_, "SELECT content_hash FROM blocks WHERE chain_id = ? AND block = ?");
        existing.bind(1, chain_id).bind(2, block.block);
        if (existing.step() && existing.text_col(0) == content_hash) return;
    }

    try {
        exec(db_, "BEGIN IMMEDIATE");
        Statement del(db_, "DELETE FROM records WHERE chain_id = ? AND block = ?");
        del.bind(1, chain_id).bind(2, block.block).run();

        Statement ins(db_,
                      "INSERT INTO records (chain_id, tx_hash, ordinal, block, tx_index, timestamp, day_utc, kind, "
                      "profit_token, profit_raw, usd_profit, route, path_length) "
                      "VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)");
        for (const auto& r : sorted) {
            ins.bind(1, chain_id)
                .bind(2, r.tx_hash.hex())
                .bind(3, static_cast<std::int64_t>(r.ordinal))
                .bind(4, r.block_number)
                .bind(5, r.tx_index)
                .bind(6, r.timestamp)
                .bind(7, r.day)
                .bind(8, std::string(to_string(r.kind)))
                .bind(9, r.profit_token.hex())
                .bind(10, to_dec(r.profit_raw));
            if (r.usd_profit) {
                ins.bind(11, r.usd_profit->str());
            } else {
                ins.bind_null(11);
            }
            ins.bind(12, std::string(to_string(r.route))).bind(13, static_cast<std::int64_t>(r.path_length));
            ins.run();
        }

        Statement up(db_,
                     "INSERT OR REPLACE INTO blocks (chain_id, block, timestamp, tx_count, diagnostics, findings, "
                     "content_hash) VALUES (?, ?, ?, ?, ?, ?, ?)");
        up.bind(1, chain_id)
            .bind(2, block.block)
            .bind(3, block.timestamp)
            .bind(4, block.tx_count)
            .bind(5, diagnostics)
            .bind(6, findings_text)
            .bind(7, content_hash)
            .run();
        exec(db_, "COMMIT");
    } catch (const std::exception& e) {
        sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
        // Leave the block uninspected so a rerun picks it up.
        sqlite3_exec(db_, ("DELETE FROM blocks WHERE chain_id = " + std::to_string(chain_id) +
                           " AND block = " + std::to_string(block.block))
                              .c_str(),
                     nullptr, nullptr, nullptr);
        throw StorageError("persisting block " + std::to_string(block.block) + " failed: " + e.what());
    }
}

RangeQuery Store::query_range(std::uint64_t chain_id, std::uint64_t from, std::uint64_t to) const {
    RangeQuery out;
    Statement blocks(db_,
                     "SELECT block, timestamp, tx_count, diagnostics FROM blocks "
                     "WHERE chain_id = ? AND block BETWEEN ? AND ? ORDER BY block");
    blocks.bind(1, chain_id).bind(2, from).bind(3, to);
    while (blocks.step()) {
        BlockCoverage c;
        c.block = static_cast<std::uint64_t>(blocks.int_col(0));
        c.timestamp = static_cast<std::uint64_t>(blocks.int_col(1));
        c.tx_count = static_cast<std::uint64_t>(blocks.int_col(2));
        c.diagnostics = diagnostics_from_json(json::parse(blocks.text_col(3)));
        out.coverage.emplace(c.block, c);
    }

    Statement recs(db_,
                   "SELECT tx_hash, ordinal, block, tx_index, timestamp, day_utc, kind, profit_token, profit_raw, "
                   "usd_profit, route, path_length FROM records WHERE chain_id = ? AND block BETWEEN ? AND ? "
                   "ORDER BY block, tx_index, ordinal, tx_hash");
    recs.bind(1, chain_id).bind(2, from).bind(3, to);
    while (recs.step()) {
        PricedMevRecord r;
        r.tx_hash = Hash32::from_hex(recs.text_col(0));
        r.ordinal = static_cast<std::uint32_t>(recs.int_col(1));
        r.block_number = static_cast<std::uint64_t>(recs.int_col(2));
        r.tx_index = static_cast<std::uint64_t>(recs.int_col(3));
        r.timestamp = static_cast<std::uint64_t>(recs.int_col(4));
        r.day = recs.text_col(5);
        r.kind = finding_kind_from_string(recs.text_col(6));
        r.profit_token = Address::from_hex(recs.text_col(7));
        r.profit_raw = i256_from_dec(recs.text_col(8));
        if (!recs.is_null(9)) r.usd_profit = Fixed6::parse(recs.text_col(9));
        r.route = price_route_from_string(recs.text_col(10));
        r.path_length = static_cast<std::uint32_t>(recs.int_col(11));
        out.records.push_back(std::move(r));
    }
    return out;
}

std::vector<BlockInterval> Store::missing_intervals(std::uint64_t chain_id, std::uint64_t from, std::uint64_t to) const {
    std::vector<BlockInterval> gaps;
    if (from > to) return gaps;
    Statement blocks(db_, "SELECT block FROM blocks WHERE chain_id = ? AND block BETWEEN ? AND ? ORDER BY block");
    blocks.bind(1, chain_id).bind(2, from).bind(3, to);
    std::uint64_t expected = from;
    bool done = false;
    while (blocks.step()) {
        const auto b = static_cast<std::uint64_t>(blocks.int_col(0));
        if (b > expected) gaps.push_back({expected, b - 1});
        if (b == to) {
            done = true;
            break;
        }
        expected = b + 1;
    }
    if (!done) gaps.push_back({expected, to});
    return gaps;
}

std::string Store::findings_json(std::uint64_t chain_id, std::uint64_t block) const {
    Statement q(db_, "SELECT findings FROM blocks WHERE chain_id = ? AND block = ?");
    q.bind(1, chain_id).bind(2, block);
    return q.step() ? q.text_col(0) : std::string("null");
}

void export_records(std::vector<PricedMevRecord> records, std::uint64_t chain_id, ExportFormat format,
                    const std::filesystem::path& path) {
    sort_records(records);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write export " + path.string());
    if (format == ExportFormat::csv) {
        out << kRecordCsvHeader << '\n';
        for (const auto& r : records) {
            out << chain_id << ',' << r.block_number << ',' << r.day << ',' << r.tx_hash.hex() << ',' << to_string(r.kind)
                << ',' << r.profit_token.hex() << ',' << to_dec(r.profit_raw) << ','
                << (r.usd_profit ? r.usd_profit->str() : std::string{}) << ',' << to_string(r.route) << ','
                << r.path_length << '\n';
        }
    } else {
        for (const auto& r : records) out << record_to_json(r, chain_id).dump() << '\n';
    }
    if (!out) throw StorageError("write failed for export " + path.string());
}

}  // namespace mev
