#include "hfvol/series_io.hpp"

#include "hfvol/error.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

namespace hfvol {

namespace {

struct Columns {
    std::vector<Timestamp> timestamps;
    std::vector<double> values;
};

Columns read_two_columns(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw DataError("'" + path.string() + "': empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("timestamp,", 0) != 0)
        throw DataError("'" + path.string() + "': expected header 'timestamp,value'");

    Columns cols;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.find(',');
        auto where = [&] { return "'" + path.string() + "' line " + std::to_string(line_no); };
        if (comma == std::string::npos) throw DataError(where() + ": expected two columns");
        auto ts = parse_timestamp(std::string_view(line).substr(0, comma));
        if (!ts) throw DataError(where() + ": bad timestamp");
        double v = 0.0;
        const char* first = line.data() + comma + 1;
        const char* last = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last) throw DataError(where() + ": bad value");
        if (!cols.timestamps.empty() && *ts <= cols.timestamps.back())
            throw DataError(where() + ": timestamps must be strictly increasing");
        cols.timestamps.push_back(*ts);
        cols.values.push_back(v);
    }
    return cols;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    return out;
}

} // namespace

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_series_csv(std::ostream& out, std::span<const Timestamp> timestamps,
                      std::span<const double> values) {
    out << "timestamp,value\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        out << format_timestamp(timestamps[i]) << ',' << format_double(values[i]) << '\n';
}

void write_bars_csv(const std::filesystem::path& path, const BarSeries& bars) {
    auto out = open_out(path);
    write_series_csv(out, bars.timestamps, bars.close_prices);
}

void write_returns_csv(const std::filesystem::path& path, const ReturnSeries& returns) {
    auto out = open_out(path);
    write_series_csv(out, returns.timestamps, returns.values);
}

BarSeries read_bars_csv(const std::filesystem::path& path, int intervals_per_day) {
    auto cols = read_two_columns(path);
    BarSeries bars;
    bars.timestamps = std::move(cols.timestamps);
    bars.close_prices = std::move(cols.values);
    bars.intervals_per_day = intervals_per_day;
    bars.contract_id = path.stem().string();
    return bars;
}

ReturnSeries read_returns_csv(const std::filesystem::path& path, int intervals_per_day) {
    auto cols = read_two_columns(path);
    ReturnSeries r;
    r.timestamps = std::move(cols.timestamps);
    r.values = std::move(cols.values);
    r.intervals_per_day = intervals_per_day;
    return r;
}

} // namespace hfvol
