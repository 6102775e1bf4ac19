#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "cshap/error.hpp"
#include "cshap/models.hpp"
#include "cshap/random.hpp"
#include "cshap/synthetic.hpp"

using namespace cshap;
using namespace cshap::models;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no cshap::Error thrown");
    return ErrorCode::InvalidArgument;
}

WindowBatch batch_of(std::initializer_list<std::vector<double>> rows) {
    WindowBatch b(rows.begin()->size());
    for (const auto& r : rows) b.push_back(r);
    return b;
}

} // namespace

TEST_CASE("window batch layout") {
    auto b = batch_of({{1, 2, 3}, {4, 5, 6}});
    CHECK(b.size() == 2);
    CHECK(b.length() == 3);
    CHECK(b.row(1)[0] == 4.0);
    CHECK(code_of([&] { b.push_back(std::vector<double>{1.0}); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("persistence and seasonal-naive baselines") {
    const auto b = batch_of({{1, 2, 3, 4, 5, 6}, {6, 5, 4, 3, 2, 1}});
    CHECK(persistence().predict(b) == std::vector<double>{6, 1});
    // Period 2 on L = 6 reads input[4].
    CHECK(seasonal_naive(2, 6).predict(b) == std::vector<double>{5, 2});
    CHECK(seasonal_naive(6 - 1, 6).predict(b) == std::vector<double>{2, 5});
    CHECK(code_of([] { seasonal_naive(6, 6); }) == ErrorCode::PeriodTooLong);
    CHECK(code_of([] { seasonal_naive(200, 168); }) == ErrorCode::PeriodTooLong);
}

TEST_CASE("handle contract: size and finiteness") {
    const ModelHandle wrong_size("short", [](const WindowBatch&) { return std::vector<double>{1.0}; }, true);
    CHECK(code_of([&] { wrong_size.predict(batch_of({{1.0}, {2.0}})); }) == ErrorCode::ModelFailure);
    const ModelHandle nan_model(
        "nan", [](const WindowBatch& b) { return std::vector<double>(b.size(), std::nan("")); }, true);
    CHECK(code_of([&] { nan_model.predict(batch_of({{1.0}})); }) == ErrorCode::ModelFailure);
    const ModelHandle inf_model(
        "inf",
        [](const WindowBatch& b) { return std::vector<double>(b.size(), std::numeric_limits<double>::infinity()); },
        true);
    CHECK(code_of([&] { inf_model.predict_one(std::vector<double>{1.0}); }) == ErrorCode::ModelFailure);
}

TEST_CASE("copies share the batch call counter") {
    const auto m = persistence();
    const auto copy = m;
    m.predict(batch_of({{1.0}}));
    copy.predict(batch_of({{1.0}, {2.0}}));
    CHECK(m.batch_calls() == 2);
    CHECK(copy.batch_calls() == 2);
}

TEST_CASE("default lags") {
    const auto lags = default_lags();
    REQUIRE(lags.size() == 31);
    CHECK(lags.front() == 1);
    CHECK(lags[23] == 24);
    CHECK(lags.back() == 168);
}

TEST_CASE("ridge lag model agrees with the penalized least-squares oracle") {
    random::Engine rng(21);
    const std::size_t L = 30;
    const std::vector<std::size_t> lags{1, 2, 24};
    std::vector<series::Window> train(80);
    for (auto& w : train) {
        w.input.resize(L);
        for (auto& v : w.input) v = random::standard_normal(rng);
        w.target = 0.5 * w.input[L - 1] - 0.25 * w.input[L - 2] + 0.1 * w.input[L - 24] + 2.0 +
                   0.05 * random::standard_normal(rng);
    }
    const double ridge = 1.0;
    const auto model = train_ridge(train, lags, ridge);

    // Oracle: columns [1, lag features], penalty 0 on the intercept.
    linalg::Matrix x(train.size(), 1 + lags.size());
    std::vector<double> y(train.size());
    for (std::size_t r = 0; r < train.size(); ++r) {
        x(r, 0) = 1.0;
        for (std::size_t c = 0; c < lags.size(); ++c) x(r, c + 1) = train[r].input[L - lags[c]];
        y[r] = *train[r].target;
    }
    const std::vector<double> pen{0.0, ridge, ridge, ridge};
    const auto beta = synth::dense_ls_oracle(x, y, pen);
    CHECK(model.intercept == Catch::Approx(beta[0]).margin(1e-10));
    for (std::size_t c = 0; c < lags.size(); ++c) CHECK(model.coefficients[c] == Catch::Approx(beta[c + 1]).margin(1e-10));

    CHECK(std::abs(model.coefficients[0] - 0.5) < 0.05);
    const auto h = model.handle();
    CHECK(h.thread_safe());
    CHECK(h.predict_one(train[0].input) == model.predict(train[0].input));
    CHECK(code_of([&] { model.predict(std::vector<double>(L - 1, 0.0)); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("ridge training preconditions") {
    std::vector<series::Window> few(3);
    for (auto& w : few) {
        w.input = {1.0, 2.0, 3.0};
        w.target = 1.0;
    }
    CHECK(code_of([&] { train_ridge(few, {1, 2, 3}, 1.0); }) == ErrorCode::InsufficientTrainingData);
    CHECK(code_of([&] { train_ridge(few, {4}, 1.0); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { train_ridge(few, {1}, -1.0); }) == ErrorCode::InvalidArgument);
    // Constant features with no penalty leave the system singular.
    CHECK(code_of([&] { train_ridge(few, {1}, 0.0); }) == ErrorCode::SingularSystem);
}
