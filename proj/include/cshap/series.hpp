#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cshap::series {

// Minutes since 1970-01-01T00:00 (no timezone arithmetic).
using Timestamp = std::int64_t;

// Accepts "YYYY-MM-DDTHH:MM", "YYYY-MM-DD HH:MM" and an optional ":SS"
// (seconds must be zero). Throws Error{MalformedRow} on other input.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp ts);

class TimeSeries {
public:
    TimeSeries(Timestamp start, std::int64_t step_minutes, std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    Timestamp start() const noexcept { return start_; }
    std::int64_t step_minutes() const noexcept { return step_; }
    Timestamp timestamp(std::size_t i) const noexcept {
        return start_ + static_cast<std::int64_t>(i) * step_;
    }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    TimeSeries slice(std::size_t first, std::size_t count) const;

private:
    Timestamp start_;
    std::int64_t step_;
    std::vector<double> values_;
};

struct CsvOptions {
    std::string value_column = "value";
    std::string timestamp_column = "Datetime";
    // Fill a single missing step by linear interpolation.
    bool gap_fill = false;
};

TimeSeries parse_csv(std::istream& in, const CsvOptions& options = {});
TimeSeries load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
void write_csv(std::ostream& out, const TimeSeries& series,
               std::string_view timestamp_column = "Datetime",
               std::string_view value_column = "value");

struct SplitSpec {
    double train_fraction = 0.8;
};

// First part holds floor(train_fraction * n) points.
std::pair<TimeSeries, TimeSeries> split(const TimeSeries& series, const SplitSpec& spec = {});

struct Window {
    std::vector<double> input;
    std::optional<double> target;
    std::size_t origin_index = 0;
    Timestamp origin_time = 0;
};

enum class WindowTarget {
    None,     // every window is `length` input values
    LastValue // input = first length-1 values, target = last value
};

std::size_t window_count(std::size_t n, std::size_t length, std::size_t stride);

std::vector<Window> make_windows(const TimeSeries& series, std::size_t length, std::size_t stride,
                                 WindowTarget target = WindowTarget::LastValue);

class Scaler {
public:
    Scaler(double mean, double std);

    // Population (divide-by-n) moments over `values`.
    static Scaler fit(std::span<const double> values);

    double mean() const noexcept { return mean_; }
    double std() const noexcept { return std_; }

    double transform(double x) const noexcept { return (x - mean_) / std_; }
    double inverse(double x) const noexcept { return x * std_ + mean_; }

    std::vector<double> transform(std::span<const double> xs) const;
    std::vector<double> inverse(std::span<const double> xs) const;
    Window transform(const Window& w) const;

private:
    double mean_;
    double std_;
};

// Fits over every input value of every window (targets excluded).
Scaler fit_scaler(std::span<const Window> train);

} // namespace cshap::series
