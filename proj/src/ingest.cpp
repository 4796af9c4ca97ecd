#include "hfvol/ingest.hpp"

#include "hfvol/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <tuple>

namespace hfvol::ingest {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    while (true) {
        auto pos = line.find(delim);
        out.push_back(trim(line.substr(0, pos)));
        if (pos == std::string_view::npos) break;
        line.remove_prefix(pos + 1);
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size() && !text.empty();
}

int two_digit_year(int yy) { return yy >= 50 ? 1900 + yy : 2000 + yy; }

// Months since year 0, or nullopt for an unrecognised code.
std::optional<int> expiry_key(std::string_view code) {
    static constexpr std::string_view kMonthLetters = "FGHJKMNQUVXZ";
    static constexpr std::array<std::string_view, 12> kMonthNames{
        "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"};
    code = trim(code);
    int year = 0, month = 0;
    if (code.size() == 6 && parse_number(code.substr(0, 4), year) &&
        parse_number(code.substr(4, 2), month)) {
    } else if (code.size() == 7 && code[4] == '-' && parse_number(code.substr(0, 4), year) &&
               parse_number(code.substr(5, 2), month)) {
    } else if (code.size() >= 5 && std::isalpha(static_cast<unsigned char>(code[0]))) {
        auto name = lower(code.substr(0, 3));
        auto it = std::find(kMonthNames.begin(), kMonthNames.end(), name);
        auto rest = code.substr(3);
        if (!rest.empty() && (rest.front() == '-' || rest.front() == ' ')) rest.remove_prefix(1);
        int y = 0;
        if (it == kMonthNames.end() || !parse_number(rest, y)) return std::nullopt;
        month = static_cast<int>(it - kMonthNames.begin()) + 1;
        year = rest.size() == 2 ? two_digit_year(y) : y;
    } else if ((code.size() == 3 || code.size() == 5) &&
               kMonthLetters.find(static_cast<char>(std::toupper(static_cast<unsigned char>(code[0])))) !=
                   std::string_view::npos) {
        int y = 0;
        if (!parse_number(code.substr(1), y)) return std::nullopt;
        month = static_cast<int>(kMonthLetters.find(
                    static_cast<char>(std::toupper(static_cast<unsigned char>(code[0]))))) + 1;
        year = code.size() == 3 ? two_digit_year(y) : y;
    } else {
        return std::nullopt;
    }
    if (month < 1 || month > 12) return std::nullopt;
    return year * 12 + (month - 1);
}

} // namespace

RecordType parse_record_type(std::string_view text) {
    auto t = lower(trim(text));
    if (t == "trade" || t == "t" || t == "trd") return RecordType::Trade;
    if (t == "bid" || t == "b") return RecordType::Bid;
    if (t == "ask" || t == "a" || t == "offer") return RecordType::Ask;
    return RecordType::Other;
}

const char* to_string(RecordType type) noexcept {
    switch (type) {
    case RecordType::Trade: return "trade";
    case RecordType::Bid: return "bid";
    case RecordType::Ask: return "ask";
    case RecordType::Other: return "other";
    }
    return "other";
}

TickFormat TickFormat::parse(std::string_view text) {
    TickFormat f;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("format descriptor line " + std::to_string(line_no) +
                              ": expected key = value");
        auto key = lower(trim(line.substr(0, eq)));
        // Keep the raw value for the delimiter so that a bare space or tab survives.
        auto value = line.substr(eq + 1);
        auto name = std::string(trim(value));
        if (key == "delimiter") {
            auto v = lower(name);
            if (v == "tab" || v == "\\t") f.delimiter = '\t';
            else if (v == "space") f.delimiter = ' ';
            else if (v == "comma") f.delimiter = ',';
            else if (v == "semicolon") f.delimiter = ';';
            else if (name.size() == 1) f.delimiter = name[0];
            else throw ConfigError("format descriptor: bad delimiter '" + name + "'");
        } else if (key == "timestamp") f.timestamp_column = name;
        else if (key == "price") f.price_column = name;
        else if (key == "volume") f.volume_column = name;
        else if (key == "expiry") f.expiry_column = name;
        else if (key == "record_type") f.record_type_column = name;
        else throw ConfigError("format descriptor: unknown key '" + key + "'");
    }
    return f;
}

TickFormat TickFormat::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open format descriptor '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

ParseResult parse_ticks(std::istream& in, const TickFormat& format) {
    ParseResult result;
    std::string line;
    if (!std::getline(in, line)) return result;  // empty file
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split(line, format.delimiter);
    auto column_of = [&](const std::string& name) -> long {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (lower(header[i]) == lower(name)) return static_cast<long>(i);
        return -1;
    };
    const long c_ts = column_of(format.timestamp_column);
    const long c_price = column_of(format.price_column);
    const long c_volume = column_of(format.volume_column);
    const long c_expiry = column_of(format.expiry_column);
    const long c_type = column_of(format.record_type_column);
    if (c_ts < 0 || c_price < 0)
        throw DataError("tick header lacks the '" +
                        (c_ts < 0 ? format.timestamp_column : format.price_column) + "' column");

    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        ++result.data_lines;
        const auto fields = split(line, format.delimiter);
        auto reject = [&](std::string reason) {
            result.rejects.push_back({line_no, std::move(reason)});
        };
        if (fields.size() != header.size()) {
            reject("expected " + std::to_string(header.size()) + " fields, got " +
                   std::to_string(fields.size()));
            continue;
        }
        TickRecord rec;
        auto ts = parse_timestamp(fields[c_ts]);
        if (!ts) {
            reject("bad timestamp '" + std::string(fields[c_ts]) + "'");
            continue;
        }
        rec.timestamp = *ts;
        if (!parse_number(fields[c_price], rec.price)) {
            reject("bad price '" + std::string(fields[c_price]) + "'");
            continue;
        }
        if (c_volume >= 0 && !fields[c_volume].empty() &&
            (!parse_number(fields[c_volume], rec.volume) || rec.volume < 0)) {
            reject("bad volume '" + std::string(fields[c_volume]) + "'");
            continue;
        }
        if (c_expiry >= 0) rec.expiry_code = std::string(fields[c_expiry]);
        if (c_type >= 0) rec.record_type = parse_record_type(fields[c_type]);
        if (rec.record_type == RecordType::Trade && !(rec.price > 0.0)) {
            reject("non-positive trade price");
            continue;
        }
        result.records.push_back(std::move(rec));
    }
    return result;
}

ParseResult parse_ticks_file(const std::filesystem::path& path, const TickFormat& format) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open tick file '" + path.string() + "'");
    return parse_ticks(in, format);
}

bool expiry_before(const std::string& a, const std::string& b) {
    auto ka = expiry_key(a);
    auto kb = expiry_key(b);
    if (ka && kb) return *ka != *kb ? *ka < *kb : a < b;
    if (ka != kb) return ka.has_value();  // recognised codes first
    return a < b;
}

FrontContractSelection select_front_contract(const std::vector<TickRecord>& ticks) {
    std::map<Date, std::map<std::string, std::int64_t>> daily;
    bool any_trade = false;
    for (const auto& t : ticks) {
        if (t.record_type != RecordType::Trade) continue;
        any_trade = true;
        daily[date_of(t.timestamp)][t.expiry_code] += t.volume;
    }
    if (!any_trade) throw DataError("select_front_contract: no trade records");

    FrontContractSelection sel;
    std::optional<std::string> active;
    for (const auto& [day, volumes] : daily) {
        if (!active) {
            // Busiest expiry on the first day; ties go to the nearer delivery.
            const std::string* best = nullptr;
            std::int64_t best_volume = -1;
            for (const auto& [code, vol] : volumes) {
                if (vol > best_volume || (vol == best_volume && expiry_before(code, *best))) {
                    best = &code;
                    best_volume = vol;
                }
            }
            active = *best;
        } else {
            auto it = volumes.find(*active);
            const std::int64_t incumbent = it == volumes.end() ? 0 : it->second;
            const std::string* next = nullptr;
            std::int64_t next_volume = incumbent;
            for (const auto& [code, vol] : volumes) {
                if (!expiry_before(*active, code)) continue;
                if (vol > next_volume) {
                    next = &code;
                    next_volume = vol;
                }
            }
            if (next) {
                sel.rolls.push_back({day, *active, *next});
                active = *next;
            }
        }
        sel.active_by_day[day] = *active;
    }

    for (const auto& t : ticks) {
        auto it = sel.active_by_day.find(date_of(t.timestamp));
        if (it != sel.active_by_day.end() && t.expiry_code == it->second) sel.ticks.push_back(t);
    }
    return sel;
}

BarSeries build_bars(std::vector<TickRecord> ticks, const IngestConfig& config) {
    const auto& cal = config.calendar;
    const int per_day = cal.intervals_per_day(config.bar_width);
    const long width_s = config.bar_width * 60L;
    const long open_s = cal.session_open * 60L;
    const long session_s = cal.session_minutes() * 60L;

    std::stable_sort(ticks.begin(), ticks.end(),
                     [](const TickRecord& a, const TickRecord& b) { return a.timestamp < b.timestamp; });

    struct Slot {
        double price;
        const std::string* expiry;
    };
    // (date, interval index) -> last qualifying trade; ticks are time-ordered so the
    // final write to a slot is its closing trade.
    std::map<std::pair<Date, int>, Slot> slots;
    for (const auto& t : ticks) {
        if (!config.trade_types_used.count(t.record_type) || !(t.price > 0.0)) continue;
        const Date day = date_of(t.timestamp);
        if (!cal.is_trading_day(day)) continue;
        const long offset = seconds_of_day(t.timestamp) - open_s;
        if (offset < 0 || offset > session_s) continue;
        int k = static_cast<int>(offset / width_s);
        if (k == per_day) k = per_day - 1;  // a trade exactly at the close belongs to the last bar
        slots[{day, k}] = Slot{t.price, &t.expiry_code};
    }

    BarSeries bars;
    bars.intervals_per_day = per_day;
    bars.contract_id = cal.name;
    bars.timestamps.reserve(slots.size());
    bars.close_prices.reserve(slots.size());
    const std::string* prev_expiry = nullptr;
    for (const auto& [key, slot] : slots) {
        const auto& [day, k] = key;
        if (prev_expiry && *prev_expiry != *slot.expiry) bars.segment_starts.push_back(bars.size());
        prev_expiry = slot.expiry;
        bars.timestamps.push_back(at_minutes(day, cal.session_open + (k + 1) * config.bar_width));
        bars.close_prices.push_back(slot.price);
    }
    return bars;
}

std::map<Date, int> bars_per_day(const BarSeries& bars) {
    std::map<Date, int> out;
    for (auto ts : bars.timestamps) ++out[date_of(ts)];
    return out;
}

} // namespace hfvol::ingest
