#include "hfvol/calendar.hpp"

#include "hfvol/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

namespace hfvol {

namespace {

constexpr std::array<std::string_view, 7> kWeekdayNames{"sun", "mon", "tue", "wed",
                                                         "thu", "fri", "sat"};

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

template <typename F>
void for_each_item(std::string_view list, F&& f) {
    while (!list.empty()) {
        auto comma = list.find(',');
        auto item = trim(list.substr(0, comma));
        if (!item.empty()) f(item);
        if (comma == std::string_view::npos) break;
        list.remove_prefix(comma + 1);
    }
}

Date ymd(int y, unsigned m, unsigned d) {
    return Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

TradingCalendar make(std::string name, int open, int close) {
    TradingCalendar c;
    c.name = std::move(name);
    c.session_open = open;
    c.session_close = close;
    c.holiday_dates = liffe_holidays_1998_1999();
    return c;
}

} // namespace

bool TradingCalendar::is_trading_day(Date d) const {
    const std::chrono::weekday wd{std::chrono::sys_days{d}};
    if (weekend_days.count(wd.c_encoding())) return false;
    return holiday_dates.count(d) == 0;
}

void TradingCalendar::validate(int bar_width_minutes) const {
    if (bar_width_minutes <= 0) throw ConfigError("calendar: bar width must be positive");
    if (session_open < 0 || session_close > 24 * 60 || session_open >= session_close)
        throw ConfigError("calendar '" + name + "': session_open must precede session_close");
    if (session_minutes() % bar_width_minutes != 0)
        throw ConfigError("calendar '" + name + "': " + std::to_string(bar_width_minutes) +
                          "-minute bars do not divide the " + std::to_string(session_minutes()) +
                          "-minute session");
}

int TradingCalendar::intervals_per_day(int bar_width_minutes) const {
    validate(bar_width_minutes);
    return session_minutes() / bar_width_minutes;
}

std::set<Date> liffe_holidays_1998_1999() {
    return {
        ymd(1998, 1, 1),  ymd(1998, 4, 10), ymd(1998, 4, 13), ymd(1998, 5, 4),
        ymd(1998, 5, 25), ymd(1998, 8, 31), ymd(1998, 12, 25), ymd(1998, 12, 28),
        ymd(1998, 12, 31), ymd(1999, 1, 1), ymd(1999, 4, 2),  ymd(1999, 4, 5),
        ymd(1999, 5, 3),  ymd(1999, 5, 31), ymd(1999, 8, 30), ymd(1999, 12, 27),
        ymd(1999, 12, 28), ymd(1999, 12, 31),
    };
}

TradingCalendar ftse100_calendar() { return make("FTSE100", 8 * 60 + 35, 18 * 60); }
TradingCalendar long_gilt_calendar() { return make("UK Long Gilt", 8 * 60, 18 * 60); }
// Last trade prints at 17:57 but only complete 5-minute intervals are kept.
TradingCalendar short_sterling_calendar() { return make("Sterling", 8 * 60 + 5, 17 * 60 + 55); }

TradingCalendar resolve_calendar(std::string_view name_or_path) {
    const auto key = lower(name_or_path);
    if (key == "ftse100" || key == "ftse") return ftse100_calendar();
    if (key == "gilt" || key == "long_gilt" || key == "uk_long_gilt") return long_gilt_calendar();
    if (key == "sterling" || key == "short_sterling") return short_sterling_calendar();
    return load_calendar(std::filesystem::path(name_or_path));
}

TradingCalendar parse_calendar(std::string_view text) {
    TradingCalendar cal;
    cal.session_open = -1;
    cal.session_close = -1;
    bool weekend_set = false;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("calendar line " + std::to_string(line_no) + ": expected key = value");
        const auto key = lower(trim(line.substr(0, eq)));
        const auto value = trim(line.substr(eq + 1));
        if (key == "name") {
            cal.name = std::string(value);
        } else if (key == "session_open" || key == "session_close") {
            auto minutes = parse_time_of_day(value);
            if (!minutes)
                throw ConfigError("calendar line " + std::to_string(line_no) + ": bad time '" +
                                  std::string(value) + "'");
            (key == "session_open" ? cal.session_open : cal.session_close) = *minutes;
        } else if (key == "holidays") {
            for_each_item(value, [&](std::string_view item) {
                auto d = parse_date(item);
                if (!d)
                    throw ConfigError("calendar line " + std::to_string(line_no) + ": bad date '" +
                                      std::string(item) + "'");
                cal.holiday_dates.insert(*d);
            });
        } else if (key == "weekend") {
            if (!weekend_set) cal.weekend_days.clear();
            weekend_set = true;
            for_each_item(value, [&](std::string_view item) {
                const auto name = lower(item).substr(0, 3);
                auto it = std::find(kWeekdayNames.begin(), kWeekdayNames.end(), name);
                if (it == kWeekdayNames.end())
                    throw ConfigError("calendar line " + std::to_string(line_no) +
                                      ": unknown weekday '" + std::string(item) + "'");
                cal.weekend_days.insert(static_cast<unsigned>(it - kWeekdayNames.begin()));
            });
        } else {
            throw ConfigError("calendar line " + std::to_string(line_no) + ": unknown key '" + key +
                              "'");
        }
    }
    if (cal.session_open < 0 || cal.session_close < 0)
        throw ConfigError("calendar: session_open and session_close are required");
    if (cal.session_open >= cal.session_close)
        throw ConfigError("calendar: session_open must precede session_close");
    return cal;
}

TradingCalendar load_calendar(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open calendar file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    auto cal = parse_calendar(buf.str());
    if (cal.name.empty()) cal.name = path.stem().string();
    return cal;
}

std::vector<Timestamp> session_bar_times(const TradingCalendar& calendar, int bar_width_minutes,
                                         std::size_t n, Date start) {
    const int per_day = calendar.intervals_per_day(bar_width_minutes);
    std::vector<Timestamp> out;
    out.reserve(n);
    for (std::chrono::sys_days day{start}; out.size() < n; day += std::chrono::days{1}) {
        if (!calendar.is_trading_day(Date{day})) continue;
        for (int k = 1; k <= per_day && out.size() < n; ++k)
            out.push_back(at_minutes(Date{day}, calendar.session_open + k * bar_width_minutes));
    }
    return out;
}

std::string serialize_calendar(const TradingCalendar& calendar) {
    std::ostringstream out;
    out << "name = " << calendar.name << '\n';
    out << "session_open = " << format_time_of_day(calendar.session_open) << '\n';
    out << "session_close = " << format_time_of_day(calendar.session_close) << '\n';
    out << "weekend = ";
    bool first = true;
    for (auto wd : calendar.weekend_days) {
        out << (first ? "" : ", ") << kWeekdayNames[wd];
        first = false;
    }
    out << '\n';
    for (const auto& d : calendar.holiday_dates) out << "holidays = " << format_date(d) << '\n';
    return out.str();
}

} // namespace hfvol
