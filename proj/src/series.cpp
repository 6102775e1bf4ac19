#include "cshap/series.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "cshap/error.hpp"

namespace cshap::series {

namespace {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t begin = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            fields.push_back(trim(line.substr(begin, i - begin)));
            begin = i + 1;
        }
    }
    return fields;
}

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

struct Row {
    Timestamp ts;
    double value;
    std::size_t line;
};

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line) + ": " + what);
}

} // namespace

Timestamp parse_timestamp(std::string_view text) {
    text = trim(text);
    // YYYY-MM-DD[T ]HH:MM[:SS]
    const auto bad = [&]() -> Error {
        return Error(ErrorCode::MalformedRow, "invalid timestamp '" + std::string(text) + "'");
    };
    if (text.size() != 16 && text.size() != 19) throw bad();
    if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') || text[13] != ':') {
        throw bad();
    }
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    if (!parse_int(text.substr(0, 4), year) || !parse_int(text.substr(5, 2), month) ||
        !parse_int(text.substr(8, 2), day) || !parse_int(text.substr(11, 2), hour) ||
        !parse_int(text.substr(14, 2), minute)) {
        throw bad();
    }
    if (text.size() == 19) {
        if (text[16] != ':' || !parse_int(text.substr(17, 2), second) || second != 0) throw bad();
    }
    const std::chrono::year_month_day ymd{std::chrono::year{year},
                                          std::chrono::month{static_cast<unsigned>(month)},
                                          std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok() || hour < 0 || hour > 23 || minute < 0 || minute > 59) throw bad();
    const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
    return static_cast<Timestamp>(days) * 1440 + hour * 60 + minute;
}

std::string format_timestamp(Timestamp ts) {
    auto days = ts / 1440;
    auto rem = ts % 1440;
    if (rem < 0) {
        rem += 1440;
        days -= 1;
    }
    const std::chrono::year_month_day ymd{
        std::chrono::sys_days{std::chrono::days{static_cast<int>(days)}}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(rem / 60), static_cast<int>(rem % 60));
    return buf;
}

TimeSeries::TimeSeries(Timestamp start, std::int64_t step_minutes, std::vector<double> values)
    : start_(start), step_(step_minutes), values_(std::move(values)) {
    if (values_.empty()) {
        throw Error(ErrorCode::EmptyInput, "time series must hold at least one value");
    }
    if (step_ <= 0) {
        throw Error(ErrorCode::NonUniformStep, "time series step must be positive");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw Error(ErrorCode::InvalidArgument,
                        "non-finite value at index " + std::to_string(i));
        }
    }
}

TimeSeries TimeSeries::slice(std::size_t first, std::size_t count) const {
    if (first + count > values_.size()) {
        throw Error(ErrorCode::InvalidArgument, "slice out of range");
    }
    return TimeSeries(timestamp(first), step_,
                      std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(first),
                                          values_.begin() +
                                              static_cast<std::ptrdiff_t>(first + count)));
}

TimeSeries parse_csv(std::istream& in, const CsvOptions& options) {
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::size_t> ts_col;
    std::optional<std::size_t> value_col;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto header = split_fields(line);
        if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) {
            header[0].remove_prefix(3);
        }
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == options.timestamp_column) ts_col = i;
            if (header[i] == options.value_column) value_col = i;
        }
        break;
    }
    if (line_no == 0) {
        throw Error(ErrorCode::EmptyInput, "CSV input is empty");
    }
    if (!ts_col || !value_col) {
        malformed(line_no, "header lacks column '" +
                               (ts_col ? options.value_column : options.timestamp_column) + "'");
    }

    std::vector<Row> rows;
    const std::size_t needed = std::max(*ts_col, *value_col) + 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() < needed) malformed(line_no, "expected at least " + std::to_string(needed) + " fields");
        Timestamp ts = 0;
        try {
            ts = parse_timestamp(fields[*ts_col]);
        } catch (const Error& e) {
            malformed(line_no, e.what());
        }
        const auto text = fields[*value_col];
        double value = 0.0;
        const auto* end = text.data() + text.size();
        auto [ptr, ec] = std::from_chars(text.data(), end, value);
        if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
            malformed(line_no, "invalid value '" + std::string(text) + "'");
        }
        rows.push_back({ts, value, line_no});
    }
    if (rows.empty()) {
        throw Error(ErrorCode::EmptyInput, "CSV input has no data rows");
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.ts < b.ts; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].ts == rows[i - 1].ts) {
            malformed(rows[i].line, "duplicate timestamp " + format_timestamp(rows[i].ts));
        }
    }
    if (rows.size() == 1) {
        return TimeSeries(rows[0].ts, 60, {rows[0].value});
    }

    std::int64_t step = rows[1].ts - rows[0].ts;
    for (std::size_t i = 2; i < rows.size(); ++i) {
        step = std::min(step, rows[i].ts - rows[i - 1].ts);
    }

    std::vector<double> values;
    values.reserve(rows.size());
    values.push_back(rows[0].value);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto gap = rows[i].ts - rows[i - 1].ts;
        if (gap == 2 * step && options.gap_fill) {
            values.push_back(0.5 * (rows[i - 1].value + rows[i].value));
        } else if (gap != step) {
            throw Error(ErrorCode::NonUniformStep,
                        "non-uniform step at " + format_timestamp(rows[i].ts) + " (line " +
                            std::to_string(rows[i].line) + ")");
        }
        values.push_back(rows[i].value);
    }
    return TimeSeries(rows[0].ts, step, std::move(values));
}

TimeSeries load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    return parse_csv(in, options);
}

void write_csv(std::ostream& out, const TimeSeries& series, std::string_view timestamp_column,
               std::string_view value_column) {
    out << timestamp_column << ',' << value_column << '\n';
    char buf[64];
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", series[i]);
        out << format_timestamp(series.timestamp(i)) << ',' << buf << '\n';
    }
}

std::pair<TimeSeries, TimeSeries> split(const TimeSeries& series, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "train fraction must lie in (0, 1)");
    }
    const auto n = series.size();
    const auto cut = static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(n)));
    if (cut == 0 || cut >= n) {
        throw Error(ErrorCode::DegenerateSplit, "split of " + std::to_string(n) +
                                                    " points leaves an empty side");
    }
    return {series.slice(0, cut), series.slice(cut, n - cut)};
}

std::size_t window_count(std::size_t n, std::size_t length, std::size_t stride) {
    if (length == 0 || stride == 0 || length > n) return 0;
    return (n - length) / stride + 1;
}

std::vector<Window> make_windows(const TimeSeries& series, std::size_t length, std::size_t stride,
                                 WindowTarget target) {
    if (stride == 0) {
        throw Error(ErrorCode::InvalidArgument, "stride must be at least 1");
    }
    const std::size_t min_length = target == WindowTarget::LastValue ? 2 : 1;
    if (length < min_length) {
        throw Error(ErrorCode::InvalidArgument, "window length too small");
    }
    if (length > series.size()) {
        throw Error(ErrorCode::WindowTooLong, "window length " + std::to_string(length) +
                                                  " exceeds series length " +
                                                  std::to_string(series.size()));
    }
    const auto count = window_count(series.size(), length, stride);
    const auto values = series.values();
    std::vector<Window> windows;
    windows.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
        const auto origin = w * stride;
        Window win;
        win.origin_index = origin;
        win.origin_time = series.timestamp(origin);
        const auto input_len = target == WindowTarget::LastValue ? length - 1 : length;
        win.input.assign(values.begin() + static_cast<std::ptrdiff_t>(origin),
                         values.begin() + static_cast<std::ptrdiff_t>(origin + input_len));
        if (target == WindowTarget::LastValue) {
            win.target = values[origin + length - 1];
        }
        windows.push_back(std::move(win));
    }
    return windows;
}

Scaler::Scaler(double mean, double std) : mean_(mean), std_(std) {
    if (!(std_ > 0.0) || !std::isfinite(std_) || !std::isfinite(mean_)) {
        throw Error(ErrorCode::ZeroVariance, "scaler requires a positive finite std");
    }
}

Scaler Scaler::fit(std::span<const double> values) {
    if (values.empty()) {
        throw Error(ErrorCode::EmptyInput, "cannot fit a scaler on no values");
    }
    const auto n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double std = std::sqrt(ss / n);
    if (!(std > 0.0)) {
        throw Error(ErrorCode::ZeroVariance, "training values have zero variance");
    }
    return Scaler(mean, std);
}

std::vector<double> Scaler::transform(std::span<const double> xs) const {
    std::vector<double> out(xs.size());
    std::transform(xs.begin(), xs.end(), out.begin(), [this](double x) { return transform(x); });
    return out;
}

std::vector<double> Scaler::inverse(std::span<const double> xs) const {
    std::vector<double> out(xs.size());
    std::transform(xs.begin(), xs.end(), out.begin(), [this](double x) { return inverse(x); });
    return out;
}

Window Scaler::transform(const Window& w) const {
    Window out = w;
    out.input = transform(w.input);
    if (w.target) out.target = transform(*w.target);
    return out;
}

Scaler fit_scaler(std::span<const Window> train) {
    std::vector<double> all;
    for (const auto& w : train) all.insert(all.end(), w.input.begin(), w.input.end());
    return Scaler::fit(all);
}

} // namespace cshap::series
