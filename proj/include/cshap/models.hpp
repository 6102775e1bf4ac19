#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cshap/series.hpp"

namespace cshap::models {

// Contiguous row-major batch of equal-length input windows.
class WindowBatch {
public:
    explicit WindowBatch(std::size_t length, std::size_t count = 0)
        : length_(length), count_(count), values_(length * count, 0.0) {}

    std::size_t length() const noexcept { return length_; }
    std::size_t size() const noexcept { return count_; }

    std::span<const double> row(std::size_t i) const noexcept {
        return {values_.data() + i * length_, length_};
    }
    std::span<double> row(std::size_t i) noexcept { return {values_.data() + i * length_, length_}; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    void push_back(std::span<const double> window);

private:
    std::size_t length_;
    std::size_t count_;
    std::vector<double> values_;
};

using PredictFn = std::function<std::vector<double>(const WindowBatch&)>;

// Opaque batch forecaster. predict() enforces the handle contract: one finite
// output per input row. Copies share the underlying model and call counter.
class ModelHandle {
public:
    ModelHandle(std::string kind, PredictFn fn, bool thread_safe);

    std::vector<double> predict(const WindowBatch& batch) const;
    double predict_one(std::span<const double> window) const;

    const std::string& kind() const noexcept { return kind_; }
    // Built-in handles may be called concurrently; external ones may not.
    bool thread_safe() const noexcept { return thread_safe_; }
    std::uint64_t batch_calls() const noexcept { return calls_->load(); }

private:
    std::string kind_;
    PredictFn fn_;
    bool thread_safe_;
    std::shared_ptr<std::atomic<std::uint64_t>> calls_;
};

// Predicts the last input value.
ModelHandle persistence();

// Predicts input[L - period], the value one period before the target.
ModelHandle seasonal_naive(std::size_t period, std::size_t input_length);

// Ridge regression on selected lags; lag k reads input[L - k].
struct RidgeLagModel {
    std::size_t input_length = 0;
    std::vector<std::size_t> lags;
    std::vector<double> coefficients;
    double intercept = 0.0;
    double ridge = 0.0;

    double predict(std::span<const double> window) const;
    ModelHandle handle() const;
};

// Lags 1..24 plus 25, 48, 72, 96, 120, 144, 168.
std::vector<std::size_t> default_lags();

// Minimizes Σ(target − β·x − b)² + ridge·|β|²; the intercept is unpenalized.
RidgeLagModel train_ridge(std::span<const series::Window> train, std::vector<std::size_t> lags,
                          double ridge);

struct ExternalOptions {
    std::string command; // run through /bin/sh -c
    std::size_t input_length = 168;
    std::chrono::milliseconds timeout{60000};
};

// Child process speaking the line-delimited JSON protocol on stdin/stdout.
ModelHandle external_model(const ExternalOptions& options);

} // namespace cshap::models
