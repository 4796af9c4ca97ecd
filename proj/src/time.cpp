#include "hfvol/time.hpp"

#include <charconv>
#include <cstdio>

namespace hfvol {

namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > text.size()) return false;
    auto first = text.data() + pos;
    auto last = first + len;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace

std::optional<Date> parse_date(std::string_view text) {
    text = trim(text);
    int y = 0, m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    if (!read_int(text, 0, 4, y) || !read_int(text, 5, 2, m) || !read_int(text, 8, 2, d))
        return std::nullopt;
    Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
              std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok()) return std::nullopt;
    return date;
}

std::optional<int> parse_time_of_day(std::string_view text) {
    text = trim(text);
    int h = 0, m = 0;
    if (text.size() != 5 || text[2] != ':') return std::nullopt;
    if (!read_int(text, 0, 2, h) || !read_int(text, 3, 2, m)) return std::nullopt;
    if (h < 0 || h > 24 || m < 0 || m > 59 || (h == 24 && m != 0)) return std::nullopt;
    return h * 60 + m;
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    text = trim(text);
    if (text.size() < 16) return std::nullopt;
    auto date = parse_date(text.substr(0, 10));
    if (!date || (text[10] != ' ' && text[10] != 'T')) return std::nullopt;
    int h = 0, m = 0, s = 0;
    if (!read_int(text, 11, 2, h) || text[13] != ':' || !read_int(text, 14, 2, m))
        return std::nullopt;
    std::size_t end = 16;
    if (text.size() > 16) {
        if (text[16] != ':' || !read_int(text, 17, 2, s)) return std::nullopt;
        end = 19;
    }
    if (text.size() != end && !(text.size() == end + 1 && text[end] == 'Z')) return std::nullopt;
    if (h > 23 || m > 59 || s > 60) return std::nullopt;
    return Timestamp{std::chrono::sys_days{*date}} + std::chrono::hours{h} +
           std::chrono::minutes{m} + std::chrono::seconds{s};
}

std::string format_date(Date d) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

std::string format_time_of_day(int minutes) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02d:%02d", minutes / 60, minutes % 60);
    return buf;
}

std::string format_timestamp(Timestamp ts) {
    long sod = seconds_of_day(ts);
    char buf[48];
    std::snprintf(buf, sizeof buf, "T%02ld:%02ld:%02ld", sod / 3600, (sod / 60) % 60, sod % 60);
    return format_date(date_of(ts)) + buf;
}

} // namespace hfvol
