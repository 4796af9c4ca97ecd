#pragma once

#include "hfvol/calendar.hpp"
#include "hfvol/series.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace hfvol::ingest {

enum class RecordType { Trade, Bid, Ask, Other };

RecordType parse_record_type(std::string_view text);
const char* to_string(RecordType type) noexcept;

struct TickRecord {
    Timestamp timestamp;
    std::string expiry_code;
    double price = 0.0;
    std::int64_t volume = 0;
    RecordType record_type = RecordType::Trade;
};

/// Maps tick fields onto named columns of a delimited file with a header row.
/// Only timestamp and price are mandatory; a missing record_type column means
/// every row is a trade.
struct TickFormat {
    char delimiter = ',';
    std::string timestamp_column = "timestamp";
    std::string price_column = "price";
    std::string volume_column = "volume";
    std::string expiry_column = "expiry";
    std::string record_type_column = "record_type";

    /// Key-value text: "delimiter = ;", "price = Px", ... ("tab" selects '\t').
    static TickFormat parse(std::string_view text);
    static TickFormat load(const std::filesystem::path& path);
};

struct Reject {
    long line = 0;  // 1-based, header is line 1
    std::string reason;
};

struct ParseResult {
    std::vector<TickRecord> records;
    std::vector<Reject> rejects;
    long data_lines = 0;
};

/// Throws DataError when the header lacks a mandatory column; per-line problems
/// land in ParseResult::rejects.
ParseResult parse_ticks(std::istream& in, const TickFormat& format);
ParseResult parse_ticks_file(const std::filesystem::path& path, const TickFormat& format);

/// Orders delivery-month codes: "199903", "1999-03", "MAR99", "H99", "H1999".
/// Unrecognised codes sort after recognised ones, lexicographically.
bool expiry_before(const std::string& a, const std::string& b);

struct Roll {
    Date date;
    std::string from;
    std::string to;
};

struct FrontContractSelection {
    std::vector<TickRecord> ticks;
    std::vector<Roll> rolls;
    std::map<Date, std::string> active_by_day;
};

/// Daily volume crossover: start on the busiest expiry, move to a later expiry on the
/// first day its traded volume exceeds the incumbent's, never move back.
/// Throws DataError when there are no trade records.
FrontContractSelection select_front_contract(const std::vector<TickRecord>& ticks);

enum class RollRule { VolumeCrossover };

struct IngestConfig {
    int bar_width = 5;  // minutes
    TradingCalendar calendar;
    RollRule roll_rule = RollRule::VolumeCrossover;
    std::set<RecordType> trade_types_used{RecordType::Trade};
};

/// Closing price of each bar_width interval aligned to the session open. Intervals
/// without a qualifying trade, weekends, holidays and out-of-session ticks are dropped.
/// Bars are stamped with the interval's right edge. A change of expiry between
/// consecutive bars is recorded in BarSeries::segment_starts.
BarSeries build_bars(std::vector<TickRecord> ticks, const IngestConfig& config);

/// Bar count per calendar date.
std::map<Date, int> bars_per_day(const BarSeries& bars);

} // namespace hfvol::ingest
