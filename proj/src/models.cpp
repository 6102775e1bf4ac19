#include "cshap/models.hpp"

#include <algorithm>
#include <cmath>

#include "cshap/error.hpp"
#include "cshap/linalg.hpp"

namespace cshap::models {

void WindowBatch::push_back(std::span<const double> window) {
    if (window.size() != length_) {
        throw Error(ErrorCode::LengthMismatch, "batch holds windows of length " +
                                                   std::to_string(length_) + ", got " +
                                                   std::to_string(window.size()));
    }
    values_.insert(values_.end(), window.begin(), window.end());
    ++count_;
}

ModelHandle::ModelHandle(std::string kind, PredictFn fn, bool thread_safe)
    : kind_(std::move(kind)),
      fn_(std::move(fn)),
      thread_safe_(thread_safe),
      calls_(std::make_shared<std::atomic<std::uint64_t>>(0)) {}

std::vector<double> ModelHandle::predict(const WindowBatch& batch) const {
    calls_->fetch_add(1, std::memory_order_relaxed);
    auto out = fn_(batch);
    if (out.size() != batch.size()) {
        throw Error(ErrorCode::ModelFailure, kind_ + ": returned " + std::to_string(out.size()) +
                                                 " predictions for " +
                                                 std::to_string(batch.size()) + " windows");
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!std::isfinite(out[i])) {
            throw Error(ErrorCode::ModelFailure,
                        kind_ + ": non-finite prediction for window " + std::to_string(i));
        }
    }
    return out;
}

double ModelHandle::predict_one(std::span<const double> window) const {
    WindowBatch batch(window.size());
    batch.push_back(window);
    return predict(batch).front();
}

ModelHandle persistence() {
    return ModelHandle(
        "persistence",
        [](const WindowBatch& batch) {
            if (batch.length() == 0) {
                throw Error(ErrorCode::LengthMismatch, "persistence: empty windows");
            }
            std::vector<double> out(batch.size());
            for (std::size_t i = 0; i < batch.size(); ++i) out[i] = batch.row(i).back();
            return out;
        },
        true);
}

ModelHandle seasonal_naive(std::size_t period, std::size_t input_length) {
    if (period == 0) {
        throw Error(ErrorCode::InvalidArgument, "seasonal-naive period must be positive");
    }
    if (period >= input_length) {
        throw Error(ErrorCode::PeriodTooLong, "seasonal-naive period " + std::to_string(period) +
                                                  " needs an input longer than " +
                                                  std::to_string(input_length));
    }
    return ModelHandle(
        "seasonal-naive:" + std::to_string(period),
        [period, input_length](const WindowBatch& batch) {
            if (batch.length() != input_length) {
                throw Error(ErrorCode::LengthMismatch, "seasonal-naive: unexpected window length");
            }
            std::vector<double> out(batch.size());
            for (std::size_t i = 0; i < batch.size(); ++i) out[i] = batch.row(i)[input_length - period];
            return out;
        },
        true);
}

std::vector<std::size_t> default_lags() {
    std::vector<std::size_t> lags;
    for (std::size_t k = 1; k <= 24; ++k) lags.push_back(k);
    for (std::size_t k : {25, 48, 72, 96, 120, 144, 168}) lags.push_back(k);
    return lags;
}

double RidgeLagModel::predict(std::span<const double> window) const {
    if (window.size() != input_length) {
        throw Error(ErrorCode::LengthMismatch, "ridge: expected window length " +
                                                   std::to_string(input_length));
    }
    double y = intercept;
    for (std::size_t j = 0; j < lags.size(); ++j) y += coefficients[j] * window[input_length - lags[j]];
    return y;
}

ModelHandle RidgeLagModel::handle() const {
    return ModelHandle(
        "ridge",
        [model = *this](const WindowBatch& batch) {
            std::vector<double> out(batch.size());
            for (std::size_t i = 0; i < batch.size(); ++i) out[i] = model.predict(batch.row(i));
            return out;
        },
        true);
}

RidgeLagModel train_ridge(std::span<const series::Window> train, std::vector<std::size_t> lags,
                          double ridge) {
    if (lags.empty()) {
        throw Error(ErrorCode::InvalidArgument, "ridge: at least one lag required");
    }
    if (!(ridge >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "ridge: penalty must be nonnegative");
    }
    if (train.size() < lags.size() + 1) {
        throw Error(ErrorCode::InsufficientTrainingData,
                    "ridge: need at least " + std::to_string(lags.size() + 1) + " windows, got " +
                        std::to_string(train.size()));
    }
    const auto length = train.front().input.size();
    for (auto k : lags) {
        if (k == 0 || k > length) {
            throw Error(ErrorCode::InvalidArgument, "ridge: lag " + std::to_string(k) +
                                                        " outside window of length " +
                                                        std::to_string(length));
        }
    }

    const auto p = lags.size();
    const auto n = train.size();
    linalg::Matrix x(n, p);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& w = train[i];
        if (w.input.size() != length) {
            throw Error(ErrorCode::LengthMismatch, "ridge: windows differ in length");
        }
        if (!w.target) {
            throw Error(ErrorCode::InvalidArgument, "ridge: training window without target");
        }
        for (std::size_t j = 0; j < p; ++j) x(i, j) = w.input[length - lags[j]];
        y[i] = *w.target;
    }

    // Center so the intercept drops out of the penalized system.
    std::vector<double> x_mean(p, 0.0);
    double y_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) x_mean[j] += x(i, j);
        y_mean += y[i];
    }
    for (auto& m : x_mean) m /= static_cast<double>(n);
    y_mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) x(i, j) -= x_mean[j];
        y[i] -= y_mean;
    }

    const auto gram = linalg::penalized_gram(x, std::vector<double>(p, ridge));
    const auto factor = linalg::Cholesky::factor(gram);
    if (!factor) {
        throw Error(ErrorCode::SingularSystem, "ridge: normal equations are singular");
    }
    RidgeLagModel model;
    model.input_length = length;
    model.lags = std::move(lags);
    model.coefficients = factor->solve(linalg::transpose_times(x, y));
    model.ridge = ridge;
    model.intercept = y_mean;
    for (std::size_t j = 0; j < p; ++j) model.intercept -= model.coefficients[j] * x_mean[j];
    return model;
}

} // namespace cshap::models
