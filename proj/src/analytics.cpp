#include "mev/analytics.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace mev {

std::string_view to_string(Granularity g) {
    switch (g) {
        case Granularity::block: return "block";
        case Granularity::day: return "day";
        case Granularity::tx: return "tx";
    }
    return "?";
}

std::string_view to_string(Universe u) {
    switch (u) {
        case Universe::all: return "all";
        case Universe::with_mev: return "with_mev";
        case Universe::strictly_positive_tx: return "strictly_positive_tx";
    }
    return "?";
}

namespace {

Rational usd_or_zero(const PricedMevRecord& r) {
    return r.usd_profit ? r.usd_profit->to_rational() : Rational(0);
}

struct TxTotal {
    Rational usd;  // priced findings only
    bool any_priced = false;
};

/// Per-transaction totals keyed by hash; a sandwich counts toward its back-run transaction.
std::map<Hash32, TxTotal> per_tx(const std::vector<PricedMevRecord>& records) {
    std::map<Hash32, TxTotal> out;
    for (const auto& r : records) {
        auto& t = out[r.tx_hash];
        if (r.usd_profit) {
            t.usd += r.usd_profit->to_rational();
            t.any_priced = true;
        }
    }
    return out;
}

StatsRow summarize(Granularity g, Universe u, std::vector<Rational> values) {
    StatsRow row;
    row.granularity = g;
    row.universe = u;
    row.count_basis = values.size();
    if (values.empty()) return row;
    Rational sum = 0;
    for (const auto& v : values) sum += v;
    std::sort(values.begin(), values.end());
    row.median = values[(values.size() - 1) / 2];
    row.mean = sum / Rational(static_cast<long long>(values.size()));
    return row;
}

}  // namespace

StatsRow aggregate(const std::vector<PricedMevRecord>& records, const std::map<std::uint64_t, BlockCoverage>& coverage,
                   Granularity granularity, Universe universe, Metric metric) {
    for (const auto& r : records) {
        if (!coverage.contains(r.block_number)) {
            throw PreconditionError("record in block " + std::to_string(r.block_number) + " outside the inspected range");
        }
    }

    if (granularity == Granularity::tx) {
        if (metric != Metric::usd_profit) throw PreconditionError("transaction counts have no per-transaction granularity");
        std::vector<Rational> values;
        for (const auto& [hash, t] : per_tx(records)) {
            if (universe == Universe::strictly_positive_tx && !(t.any_priced && t.usd > 0)) continue;
            values.push_back(t.usd);
        }
        return summarize(granularity, universe, std::move(values));
    }
    if (universe == Universe::strictly_positive_tx) {
        throw PreconditionError("strictly_positive_tx applies to transaction granularity only");
    }

    // Period key: the block number, or its UTC day.
    auto period_of = [&](std::uint64_t block) -> std::string {
        if (granularity == Granularity::block) return std::to_string(block);
        return utc_day(coverage.at(block).timestamp);
    };

    struct Period {
        Rational usd;
        std::set<Hash32> txs;
        bool has_mev = false;
    };
    std::map<std::string, Period> periods;
    for (const auto& [block, c] : coverage) periods.try_emplace(period_of(block));
    for (const auto& r : records) {
        auto& p = periods[period_of(r.block_number)];
        p.usd += usd_or_zero(r);
        p.txs.insert(r.tx_hash);
        p.has_mev = true;
    }

    std::vector<Rational> values;
    values.reserve(periods.size());
    for (const auto& [key, p] : periods) {
        if (universe == Universe::with_mev && !p.has_mev) continue;
        values.push_back(metric == Metric::usd_profit ? p.usd : Rational(static_cast<long long>(p.txs.size())));
    }
    return summarize(granularity, universe, std::move(values));
}

Histogram histogram(const std::vector<PricedMevRecord>& records, const Rational& filter_upper, unsigned bucket_count) {
    if (filter_upper <= 0) throw PreconditionError("histogram filter must be positive");
    if (bucket_count < 1) throw PreconditionError("histogram needs at least one bucket");

    Histogram h;
    h.filter_upper = filter_upper;
    const Rational width = filter_upper / Rational(bucket_count);
    for (unsigned i = 0; i < bucket_count; ++i) {
        h.buckets.push_back({width * Rational(i), width * Rational(i + 1), 0});
    }
    h.buckets.back().upper = filter_upper;

    for (const auto& [hash, t] : per_tx(records)) {
        if (!t.any_priced) continue;
        ++h.total;
        if (t.usd < 0) {
            ++h.negative_excluded;
            continue;
        }
        if (t.usd > filter_upper) continue;
        ++h.in_filter;
        const Rational pos = t.usd / width;
        BigInt idx = boost::multiprecision::numerator(pos) / boost::multiprecision::denominator(pos);
        const auto i = std::min<std::size_t>(idx.convert_to<std::size_t>(), bucket_count - 1);
        ++h.buckets[i].count;
    }
    h.coverage_note = h.total == 0 ? Rational(0) : Rational(h.in_filter) / Rational(h.total);
    return h;
}

std::vector<TokenFrequencyRow> top_tokens(const std::vector<PricedMevRecord>& records, std::size_t n) {
    if (n < 1) throw PreconditionError("top_tokens needs n >= 1");
    std::map<Address, std::uint64_t> counts;
    for (const auto& r : records) ++counts[r.profit_token];
    std::vector<TokenFrequencyRow> rows;
    for (const auto& [token, count] : counts) {
        rows.push_back({token, count, Rational(count * 100) / Rational(records.size())});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.count > b.count; });
    if (rows.size() > n) rows.resize(n);
    return rows;
}

AggregateReport build_report(const std::vector<PricedMevRecord>& records,
                             const std::map<std::uint64_t, BlockCoverage>& coverage, std::uint64_t chain_id,
                             std::uint64_t from, std::uint64_t to) {
    AggregateReport rep;
    rep.chain_id = chain_id;
    rep.from_block = from;
    rep.to_block = to;
    rep.blocks_inspected = coverage.size();
    std::set<std::string> days;
    for (const auto& [block, c] : coverage) days.insert(utc_day(c.timestamp));
    rep.days_inspected = days.size();

    for (auto k : {FindingKind::arbitrage, FindingKind::sandwich, FindingKind::liquidation}) rep.kinds[k];
    std::set<Hash32> txs;
    for (const auto& r : records) {
        auto& split = rep.kinds[r.kind];
        ++split.findings;
        if (r.usd_profit) {
            split.usd_profit += *r.usd_profit;
            rep.total_usd_profit += *r.usd_profit;
        } else {
            ++split.unpriced;
            ++rep.unpriced_count;
        }
        txs.insert(r.tx_hash);
    }
    rep.total_findings = records.size();
    rep.total_mev_tx_count = txs.size();

    rep.profit_stats = {
        aggregate(records, coverage, Granularity::block, Universe::all),
        aggregate(records, coverage, Granularity::block, Universe::with_mev),
        aggregate(records, coverage, Granularity::day, Universe::all),
        aggregate(records, coverage, Granularity::day, Universe::with_mev),
        aggregate(records, coverage, Granularity::tx, Universe::all),
        aggregate(records, coverage, Granularity::tx, Universe::strictly_positive_tx),
    };
    rep.tx_count_stats = {
        aggregate(records, coverage, Granularity::block, Universe::all, Metric::mev_tx_count),
        aggregate(records, coverage, Granularity::block, Universe::with_mev, Metric::mev_tx_count),
        aggregate(records, coverage, Granularity::day, Universe::all, Metric::mev_tx_count),
        aggregate(records, coverage, Granularity::day, Universe::with_mev, Metric::mev_tx_count),
    };
    for (int filter : {100, 10, 1}) rep.histograms.push_back(histogram(records, Rational(filter), 10));
    rep.top_tokens = top_tokens(records, 10);
    return rep;
}

AggregateReport build_report(const Store& store, std::uint64_t chain_id, std::uint64_t from, std::uint64_t to) {
    if (from > to) throw PreconditionError("empty range: from " + std::to_string(from) + " > to " + std::to_string(to));
    auto gaps = store.missing_intervals(chain_id, from, to);
    if (!gaps.empty()) throw CoverageGapError(std::move(gaps));
    const RangeQuery q = store.query_range(chain_id, from, to);
    return build_report(q.records, q.coverage, chain_id, from, to);
}

std::vector<ReferenceTotal> load_reference_totals(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read reference totals " + path.string());
    std::vector<ReferenceTotal> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1 || line.empty()) continue;  // header
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected chain,usd_profit");
        }
        try {
            out.push_back({line.substr(0, comma), Fixed6::parse(line.substr(comma + 1)).to_rational()});
        } catch (const std::exception& e) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

namespace {

std::string opt_decimal(const std::optional<Rational>& v) { return v ? rational_to_decimal(*v, 6) : std::string{}; }

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

std::string lpad(std::string s, std::size_t width) {
    if (s.size() < width) s.insert(0, width - s.size(), ' ');
    return s;
}

std::string row_label(const StatsRow& r) {
    if (r.granularity == Granularity::tx) {
        return r.universe == Universe::strictly_positive_tx ? "MEV tx with positive profit" : "MEV tx";
    }
    std::string s = r.granularity == Granularity::block ? "Block" : "Date";
    if (r.universe == Universe::with_mev) s += " with MEV";
    return s;
}

std::string chain_name(const AggregateReport& rep, const ChainConfig* cfg) {
    return cfg ? cfg->name : "chain " + std::to_string(rep.chain_id);
}

}  // namespace

std::string stats_csv(const std::vector<StatsRow>& rows) {
    std::ostringstream os;
    os << kStatsCsvHeader << '\n';
    for (const auto& r : rows) {
        os << to_string(r.granularity) << ',' << to_string(r.universe) << ',' << opt_decimal(r.median) << ','
           << opt_decimal(r.mean) << ',' << r.count_basis << '\n';
    }
    return os.str();
}

std::string histogram_csv(const Histogram& h) {
    std::ostringstream os;
    os << kHistogramCsvHeader << '\n';
    for (const auto& b : h.buckets) {
        os << rational_to_trimmed_decimal(b.lower, 6) << ',' << rational_to_trimmed_decimal(b.upper, 6) << ','
           << b.count << '\n';
    }
    return os.str();
}

std::string top_tokens_csv(const std::vector<TokenFrequencyRow>& rows) {
    std::ostringstream os;
    os << kTopTokensCsvHeader << '\n';
    for (const auto& r : rows) os << r.token.hex() << ',' << r.count << ',' << rational_to_decimal(r.frequency_pct, 2) << '\n';
    return os.str();
}

std::string report_text(const AggregateReport& rep, const ChainConfig* cfg) {
    std::ostringstream os;
    os << "MEV report: " << chain_name(rep, cfg) << " (chain id " << rep.chain_id << ")\n";
    os << "blocks " << rep.from_block << "-" << rep.to_block << ": " << rep.blocks_inspected << " inspected over "
       << rep.days_inspected << " UTC day(s)\n\n";

    os << "total USD profit:      " << rep.total_usd_profit.str() << "\n";
    os << "MEV transactions:      " << rep.total_mev_tx_count << "\n";
    os << "findings:              " << rep.total_findings << "\n";
    os << "unpriced findings:     " << rep.unpriced_count << "\n";
    os << "note: USD totals are a lower bound. " << rep.unpriced_count
       << " finding(s) had no USDC or native-token route at their block and count as 0 USD;"
          " gas costs are not deducted.\n\n";

    os << "by kind\n";
    os << pad("kind", 14) << lpad("findings", 10) << lpad("unpriced", 10) << lpad("usd_profit", 22)
       << lpad("count_pct", 11) << "\n";
    auto share = [&](std::uint64_t n) {
        return rep.total_findings == 0 ? std::string("0.00")
                                       : rational_to_decimal(Rational(n * 100) / Rational(rep.total_findings), 2);
    };
    for (const auto& [kind, s] : rep.kinds) {
        os << pad(std::string(to_string(kind)), 14) << lpad(std::to_string(s.findings), 10)
           << lpad(std::to_string(s.unpriced), 10) << lpad(s.usd_profit.str(), 22) << lpad(share(s.findings), 11) << "\n";
    }
    os << pad("all", 14) << lpad(std::to_string(rep.total_findings), 10) << lpad(std::to_string(rep.unpriced_count), 10)
       << lpad(rep.total_usd_profit.str(), 22) << lpad(share(rep.total_findings), 11) << "\n\n";

    auto stats_table = [&](const char* title, const std::vector<StatsRow>& rows) {
        os << title << "\n";
        os << pad("", 30) << lpad("median", 20) << lpad("mean", 20) << lpad("count", 10) << "\n";
        for (const auto& r : rows) {
            os << pad(row_label(r), 30) << lpad(r.median ? opt_decimal(r.median) : "-", 20)
               << lpad(r.mean ? opt_decimal(r.mean) : "-", 20) << lpad(std::to_string(r.count_basis), 10) << "\n";
        }
        os << "\n";
    };
    stats_table("profit per period (USD)", rep.profit_stats);
    stats_table("MEV transactions per period", rep.tx_count_stats);

    for (const auto& h : rep.histograms) {
        os << "profit distribution, transactions <= $" << rational_to_trimmed_decimal(h.filter_upper, 6) << " ("
           << h.in_filter << " of " << h.total << " priced transactions, "
           << rational_to_decimal(h.coverage_note * 100, 2) << "%; " << h.negative_excluded << " negative excluded)\n";
        for (const auto& b : h.buckets) {
            os << "  " << pad("[" + rational_to_trimmed_decimal(b.lower, 6) + ", " + rational_to_trimmed_decimal(b.upper, 6) +
                                  (&b == &h.buckets.back() ? "]" : ")"),
                              18)
               << lpad(std::to_string(b.count), 10) << "\n";
        }
        os << "\n";
    }

    os << "top profit tokens\n";
    for (const auto& t : rep.top_tokens) {
        std::string label = t.token.hex();
        if (cfg) {
            const auto name = cfg->token_label(t.token);
            if (name != label) label += " (" + name + ")";
        }
        os << "  " << pad(label, 60) << lpad(std::to_string(t.count), 10) << lpad(rational_to_decimal(t.frequency_pct, 2), 8)
           << "\n";
    }
    os << "\n";

    os << "total profit by chain (USD)\n";
    os << "  " << pad(chain_name(rep, cfg), 24) << lpad(rep.total_usd_profit.str(), 24) << "\n";
    if (rep.reference_totals.empty()) {
        os << "  (no reference totals supplied)\n";
    } else {
        for (const auto& ref : rep.reference_totals) {
            os << "  " << pad(ref.chain, 24) << lpad(rational_to_decimal(ref.usd_profit, 6), 24) << "  (reference)\n";
        }
    }
    return os.str();
}

std::vector<std::filesystem::path> write_report(const AggregateReport& rep, const std::filesystem::path& dir,
                                                const ChainConfig* cfg) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::string& name, const std::string& content) {
        const auto p = dir / name;
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw StorageError("cannot write " + p.string());
        out << content;
        if (!out) throw StorageError("write failed for " + p.string());
        written.push_back(p);
    };
    emit("report.txt", report_text(rep, cfg));
    emit("stats_profit.csv", stats_csv(rep.profit_stats));
    emit("stats_tx_count.csv", stats_csv(rep.tx_count_stats));
    for (const auto& h : rep.histograms) {
        std::string filter = rational_to_trimmed_decimal(h.filter_upper, 6);
        if (filter.ends_with(".0")) filter.resize(filter.size() - 2);
        emit("histogram_" + filter + ".csv", histogram_csv(h));
    }
    emit("top_tokens.csv", top_tokens_csv(rep.top_tokens));
    return written;
}

}  // namespace mev
