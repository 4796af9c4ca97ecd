#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace hfvol {

/// Seconds-resolution instant in exchange-local time (no time zone attached).
using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::year_month_day;

/// Parses "YYYY-MM-DD HH:MM:SS" or "YYYY-MM-DDTHH:MM:SS". Seconds may be omitted.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Parses "YYYY-MM-DD".
std::optional<Date> parse_date(std::string_view text);

/// Parses "HH:MM" into minutes after midnight.
std::optional<int> parse_time_of_day(std::string_view text);

/// ISO-8601 with seconds: "YYYY-MM-DDTHH:MM:SS".
std::string format_timestamp(Timestamp ts);
std::string format_date(Date d);
std::string format_time_of_day(int minutes);

inline Date date_of(Timestamp ts) {
    return Date{std::chrono::floor<std::chrono::days>(ts)};
}

/// Seconds after midnight.
inline long seconds_of_day(Timestamp ts) {
    auto day = std::chrono::floor<std::chrono::days>(ts);
    return static_cast<long>((ts - day).count());
}

inline Timestamp at_minutes(Date d, int minutes) {
    return Timestamp{std::chrono::sys_days{d}} + std::chrono::minutes{minutes};
}

} // namespace hfvol
