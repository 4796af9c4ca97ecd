#include "hfvol/calendar.hpp"
#include "hfvol/error.hpp"

#include <gtest/gtest.h>

using namespace hfvol;
using namespace std::chrono;

TEST(Calendar, BundledSessionsGivePublishedIntervalCounts) {
    EXPECT_EQ(ftse100_calendar().intervals_per_day(5), 113);
    EXPECT_EQ(long_gilt_calendar().intervals_per_day(5), 120);
    EXPECT_EQ(short_sterling_calendar().intervals_per_day(5), 118);
}

TEST(Calendar, HolidayList) {
    const auto h = liffe_holidays_1998_1999();
    EXPECT_EQ(h.size(), 18u);
    EXPECT_TRUE(h.count(Date{1998y, April, 10d}));
    EXPECT_TRUE(h.count(Date{1999y, December, 31d}));
    const auto cal = long_gilt_calendar();
    EXPECT_FALSE(cal.is_trading_day(Date{1998y, December, 25d}));
    EXPECT_FALSE(cal.is_trading_day(Date{1998y, March, 7d}));  // Saturday
    EXPECT_FALSE(cal.is_trading_day(Date{1998y, March, 8d}));  // Sunday
    EXPECT_TRUE(cal.is_trading_day(Date{1998y, March, 9d}));
}

TEST(Calendar, TradingDaysPerYear) {
    const auto cal = long_gilt_calendar();
    for (int y : {1998, 1999}) {
        int count = 0;
        for (sys_days d{year{y} / January / 1}; d < sys_days{year{y + 1} / January / 1}; d += days{1})
            count += cal.is_trading_day(Date{d});
        // 261 weekdays less the weekday holidays of that year.
        EXPECT_GE(count, 250) << y;
        EXPECT_LE(count, 253) << y;
    }
}

TEST(Calendar, WidthMustDivideSession) {
    EXPECT_THROW(ftse100_calendar().validate(10), ConfigError);
    EXPECT_NO_THROW(ftse100_calendar().validate(5));
    TradingCalendar bad;
    bad.session_open = 600;
    bad.session_close = 600;
    EXPECT_THROW(bad.validate(5), ConfigError);
}

TEST(Calendar, ParseAndSerializeRoundTrip) {
    const auto text = R"(# test calendar
name = Test
session_open = 09:00
session_close = 16:30
weekend = Sat, Sun
holidays = 1998-01-01, 1998-12-25
holidays = 1999-01-01
)";
    const auto cal = parse_calendar(text);
    EXPECT_EQ(cal.name, "Test");
    EXPECT_EQ(cal.session_open, 540);
    EXPECT_EQ(cal.session_close, 990);
    EXPECT_EQ(cal.holiday_dates.size(), 3u);
    EXPECT_EQ(cal.intervals_per_day(5), 90);

    const auto again = parse_calendar(serialize_calendar(cal));
    EXPECT_EQ(again.name, cal.name);
    EXPECT_EQ(again.session_open, cal.session_open);
    EXPECT_EQ(again.session_close, cal.session_close);
    EXPECT_EQ(again.holiday_dates, cal.holiday_dates);
    EXPECT_EQ(again.weekend_days, cal.weekend_days);
}

TEST(Calendar, ParseRejectsBadInput) {
    EXPECT_THROW(parse_calendar("session_open = 9am\nsession_close = 16:00\n"), ConfigError);
    EXPECT_THROW(parse_calendar("session_open = 09:00\nsession_close = 16:00\nholidays = 1998-02-30\n"),
                 ConfigError);
}

TEST(Calendar, ResolveByName) {
    EXPECT_EQ(resolve_calendar("FTSE100").session_open, 8 * 60 + 35);
    EXPECT_EQ(resolve_calendar("gilt").session_open, 8 * 60);
    EXPECT_EQ(resolve_calendar("Sterling").session_close, 17 * 60 + 55);
    EXPECT_ANY_THROW(resolve_calendar("/nonexistent/calendar.cal"));
}

TEST(Calendar, SessionBarTimesSkipClosedDays) {
    const auto cal = long_gilt_calendar();
    // Friday 1998-04-10 and Monday 1998-04-13 are holidays.
    const auto t = session_bar_times(cal, 5, 240, Date{1998y, April, 9d});
    ASSERT_EQ(t.size(), 240u);
    EXPECT_EQ(date_of(t.front()), (Date{1998y, April, 9d}));
    EXPECT_EQ(seconds_of_day(t.front()), 8 * 3600 + 5 * 60);
    EXPECT_EQ(seconds_of_day(t[119]), 18 * 3600);
    EXPECT_EQ(date_of(t[120]), (Date{1998y, April, 14d}));
}
