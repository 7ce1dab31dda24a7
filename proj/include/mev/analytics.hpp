#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "mev/storage.hpp"

namespace mev {

enum class Granularity { block, day, tx };
enum class Universe { all, with_mev, strictly_positive_tx };
/// What is being summarized per period: USD profit, or the number of MEV transactions.
enum class Metric { usd_profit, mev_tx_count };

std::string_view to_string(Granularity g);
std::string_view to_string(Universe u);

struct StatsRow {
    Granularity granularity = Granularity::block;
    Universe universe = Universe::all;
    std::optional<Rational> median;  // absent for an empty universe
    std::optional<Rational> mean;
    std::uint64_t count_basis = 0;
};

/// Summary statistic over one universe. `coverage` is the inspected range: every inspected block
/// is a period (or contributes its UTC day) even when it holds no MEV.
///
/// block/day: with universe=all every inspected period counts, zero-MEV ones as 0; with_mev keeps
/// periods holding at least one finding. tx: periods are MEV transactions (findings summed per
/// transaction hash, unpriced counted as 0); strictly_positive_tx keeps transactions whose
/// priced profit is > 0 and drops unpriced ones. Medians of even-sized sets take the lower middle.
/// Throws PreconditionError when a record falls outside `coverage`.
StatsRow aggregate(const std::vector<PricedMevRecord>& records, const std::map<std::uint64_t, BlockCoverage>& coverage,
                   Granularity granularity, Universe universe, Metric metric = Metric::usd_profit);

struct HistogramBucket {
    Rational lower;
    Rational upper;
    std::uint64_t count = 0;
};

struct Histogram {
    Rational filter_upper;
    std::vector<HistogramBucket> buckets;  // [lower, upper) except the last, which is closed
    std::uint64_t total = 0;               // priced transactions considered, negatives included
    std::uint64_t in_filter = 0;
    std::uint64_t negative_excluded = 0;
    Rational coverage_note;                // in_filter / total (0 when total is 0)
};

/// Equal-width histogram of per-transaction priced USD profit over [0, filter_upper].
Histogram histogram(const std::vector<PricedMevRecord>& records, const Rational& filter_upper, unsigned bucket_count);

struct TokenFrequencyRow {
    Address token;
    std::uint64_t count = 0;
    Rational frequency_pct;
};

/// Profit tokens by number of findings (priced and unpriced), descending; ties by address.
std::vector<TokenFrequencyRow> top_tokens(const std::vector<PricedMevRecord>& records, std::size_t n);

struct KindSplit {
    std::uint64_t findings = 0;
    std::uint64_t unpriced = 0;
    Fixed6 usd_profit;
};

struct ReferenceTotal {
    std::string chain;
    Rational usd_profit;
};

struct AggregateReport {
    std::uint64_t chain_id = 0;
    std::uint64_t from_block = 0;
    std::uint64_t to_block = 0;
    std::uint64_t blocks_inspected = 0;
    std::uint64_t days_inspected = 0;
    Fixed6 total_usd_profit;
    std::uint64_t total_findings = 0;
    std::uint64_t total_mev_tx_count = 0;
    std::map<FindingKind, KindSplit> kinds;  // every kind present, possibly zero
    std::uint64_t unpriced_count = 0;
    std::vector<StatsRow> profit_stats;    // Block, Block with MEV, Date, Date with MEV, MEV Tx, MEV Tx > 0
    std::vector<StatsRow> tx_count_stats;  // MEV transactions per block / day
    std::vector<Histogram> histograms;     // filters 100, 10, 1
    std::vector<TokenFrequencyRow> top_tokens;
    std::vector<ReferenceTotal> reference_totals;
};

/// Coverage gap in a report range.
class CoverageGapError : public Error {
public:
    explicit CoverageGapError(std::vector<BlockInterval> gaps)
        : Error("range not fully inspected; missing blocks: " + describe(gaps)), gaps_(std::move(gaps)) {}
    const std::vector<BlockInterval>& gaps() const { return gaps_; }

private:
    std::vector<BlockInterval> gaps_;
};

AggregateReport build_report(const std::vector<PricedMevRecord>& records,
                             const std::map<std::uint64_t, BlockCoverage>& coverage, std::uint64_t chain_id,
                             std::uint64_t from, std::uint64_t to);
/// Throws CoverageGapError when any block in [from, to] was never persisted.
AggregateReport build_report(const Store& store, std::uint64_t chain_id, std::uint64_t from, std::uint64_t to);

/// Reads "chain,usd_profit" rows (header line required).
std::vector<ReferenceTotal> load_reference_totals(const std::filesystem::path& path);

inline constexpr std::string_view kStatsCsvHeader = "granularity,universe,median,mean,count_basis";
inline constexpr std::string_view kHistogramCsvHeader = "lower,upper,count";
inline constexpr std::string_view kTopTokensCsvHeader = "token,count,frequency_pct";

std::string stats_csv(const std::vector<StatsRow>& rows);
std::string histogram_csv(const Histogram& h);
std::string top_tokens_csv(const std::vector<TokenFrequencyRow>& rows);
std::string report_text(const AggregateReport& report, const ChainConfig* cfg = nullptr);

/// Writes report.txt, stats_profit.csv, stats_tx_count.csv, histogram_<filter>.csv and
/// top_tokens.csv into `dir`. Returns the written paths.
std::vector<std::filesystem::path> write_report(const AggregateReport& report, const std::filesystem::path& dir,
                                                const ChainConfig* cfg = nullptr);

}  // namespace mev
