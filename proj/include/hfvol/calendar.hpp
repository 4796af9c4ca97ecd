#pragma once

#include "hfvol/time.hpp"

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hfvol {

/// Single-session exchange calendar: one open/close per day, weekends and holidays closed.
struct TradingCalendar {
    std::string name;
    int session_open = 0;    // minutes after midnight
    int session_close = 0;   // minutes after midnight
    std::set<Date> holiday_dates;
    std::set<unsigned> weekend_days{0, 6};  // weekday::c_encoding(), Sunday = 0

    bool is_trading_day(Date d) const;
    int session_minutes() const noexcept { return session_close - session_open; }

    /// Number of bar_width-minute intervals in one session. Calls validate().
    int intervals_per_day(int bar_width_minutes) const;

    /// Throws ConfigError unless open < close and the width divides the session.
    void validate(int bar_width_minutes) const;
};

/// LIFFE holiday closures for 1998 and 1999.
std::set<Date> liffe_holidays_1998_1999();

TradingCalendar ftse100_calendar();
TradingCalendar long_gilt_calendar();
TradingCalendar short_sterling_calendar();

/// Resolves "ftse100", "gilt" or "sterling" (case-insensitive) to a bundled calendar,
/// otherwise treats the argument as a path to a calendar file.
TradingCalendar resolve_calendar(std::string_view name_or_path);

/// Key-value calendar file:
///   name = FTSE100
///   session_open = 08:35
///   session_close = 18:00
///   weekend = Sat, Sun
///   holidays = 1998-01-01, 1998-04-10
/// Lines starting with '#' are comments; holidays may span several lines.
TradingCalendar parse_calendar(std::string_view text);
TradingCalendar load_calendar(const std::filesystem::path& path);

/// Right-edge timestamps of the first n bars on trading days from start onwards.
std::vector<Timestamp> session_bar_times(const TradingCalendar& calendar, int bar_width_minutes,
                                         std::size_t n, Date start);

std::string serialize_calendar(const TradingCalendar& calendar);

} // namespace hfvol
