#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "cshap/error.hpp"
#include "cshap/random.hpp"
#include "cshap/synthetic.hpp"

using namespace cshap;
using namespace cshap::synth;

namespace {

models::ModelHandle cubic() {
    return models::ModelHandle(
        "cubic",
        [](const models::WindowBatch& b) {
            std::vector<double> out(b.size());
            for (std::size_t i = 0; i < b.size(); ++i) {
                const auto r = b.row(i);
                double s = 0.0;
                for (std::size_t t = 0; t < r.size(); ++t) s += r[t] * (1.0 + 0.1 * static_cast<double>(t));
                out[i] = s * s * s / 10.0 + r.back();
            }
            return out;
        },
        true);
}

shap::BackgroundSet random_bg(std::size_t m, std::size_t L, std::size_t N, random::Engine& rng) {
    std::vector<decomp::Decomposition> out;
    for (std::size_t j = 0; j < N; ++j) {
        std::vector<std::vector<double>> c(m, std::vector<double>(L));
        std::vector<double> o(L, 0.0);
        std::vector<std::string> names;
        for (std::size_t i = 0; i < m; ++i) {
            names.push_back("c" + std::to_string(i));
            for (std::size_t t = 0; t < L; ++t) o[t] += c[i][t] = random::standard_normal(rng);
        }
        out.emplace_back(names, c, o);
    }
    return shap::BackgroundSet(std::move(out));
}

} // namespace

TEST_CASE("constant plant") {
    SyntheticSpec spec;
    spec.length = 50;
    spec.trend.base = 5.0;
    const auto s = generate(spec);
    for (double v : s.series.values()) CHECK(v == 5.0);
    for (double v : s.component("trend")) CHECK(v == 5.0);
    for (double v : s.component("noise")) CHECK(v == 0.0);
}

TEST_CASE("sinusoid plant") {
    SyntheticSpec spec;
    spec.length = 72;
    spec.trend.base = 2.0;
    spec.seasonal = {{"daily", 24.0, 1.0, 0.0}};
    const auto s = generate(spec);
    for (std::size_t i = 0; i < spec.length; ++i) {
        CHECK(s.series[i] == Catch::Approx(2.0 + std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 24.0)).margin(1e-12));
    }
}

TEST_CASE("generation is seeded and components sum to the series") {
    SyntheticSpec spec;
    spec.length = 500;
    spec.trend = {10.0, 0.01, {{100, 0.02}, {300, -0.05}}};
    spec.seasonal = {{"daily", 24.0, 2.0, 0.3}, {"weekly", 168.0, 1.0, 1.0}};
    spec.noise_std = 0.5;
    spec.seed = 11;
    const auto a = generate(spec);
    const auto b = generate(spec);
    CHECK(std::equal(a.series.values().begin(), a.series.values().end(), b.series.values().begin()));
    spec.seed = 12;
    CHECK_FALSE(std::equal(a.series.values().begin(), a.series.values().end(), generate(spec).series.values().begin()));
    for (std::size_t i = 0; i < 500; ++i) {
        double s = 0.0;
        for (const auto& [name, c] : a.components) s += c[i];
        CHECK(s == Catch::Approx(a.series[i]).margin(1e-12));
    }
    // Slope after both kinks: 0.01 + 0.02 - 0.05.
    const auto& tr = a.component("trend");
    CHECK(tr[400] - tr[399] == Catch::Approx(-0.02).margin(1e-12));
    CHECK(tr[150] - tr[149] == Catch::Approx(0.03).margin(1e-12));
    const auto window = planted_trend(spec.trend, 390, 20);
    CHECK(window[10] == Catch::Approx(tr[400]).margin(1e-12));
}

TEST_CASE("spec validation") {
    SyntheticSpec spec;
    CHECK_THROWS_AS(generate(spec), Error);
    spec.length = 10;
    spec.trend.kinks = {{5, 1.0}, {5, 1.0}};
    CHECK_THROWS_AS(generate(spec), Error);
    spec.trend.kinks = {{10, 1.0}};
    CHECK_THROWS_AS(generate(spec), Error);
    spec.trend.kinks.clear();
    spec.seasonal = {{"x", 1.0, 1.0, 0.0}};
    CHECK_THROWS_AS(generate(spec), Error);
}

TEST_CASE("exhaustive permutations match enumeration") {
    random::Engine rng(4);
    for (std::size_t m = 1; m <= 6; ++m) {
        const auto bg = random_bg(m, 6, 5, rng);
        const auto input = random_bg(m, 6, 1, rng).decomposition(0);
        const auto f = cubic();
        const auto exact = shap::compute_shap(input, f, bg);
        const auto perm = permutation_shapley(input, f, bg, true);
        CHECK(perm.orderings == static_cast<std::size_t>(std::tgamma(static_cast<double>(m) + 1.0) + 0.5));
        for (std::size_t i = 0; i < m; ++i) CHECK(std::abs(perm.phi[i] - exact.phi[i]) <= 1e-9);
        if (m == 1) CHECK(std::abs(perm.phi[0] - (exact.model_output - exact.base_value)) <= 1e-12);
    }
    const auto bg9 = random_bg(9, 3, 2, rng);
    CHECK_THROWS_AS(permutation_shapley(bg9.decomposition(0), cubic(), bg9, true), Error);
}

TEST_CASE("sampled permutations converge within three standard errors") {
    random::Engine rng(5);
    const auto bg = random_bg(4, 6, 8, rng);
    const auto input = random_bg(4, 6, 1, rng).decomposition(0);
    const auto exact = shap::compute_shap(input, cubic(), bg);
    const auto est = permutation_shapley(input, cubic(), bg, false, 2000, 99);
    CHECK(est.orderings == 2000);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(est.standard_error[i] > 0.0);
        CHECK(std::abs(est.phi[i] - exact.phi[i]) <= 3.0 * est.standard_error[i]);
    }
    const auto again = permutation_shapley(input, cubic(), bg, false, 2000, 99);
    CHECK(again.phi == est.phi);
}

TEST_CASE("dense oracle limits") {
    linalg::Matrix eye(3, 3);
    for (std::size_t i = 0; i < 3; ++i) eye(i, i) = 1.0;
    const std::vector<double> y{1.5, -2.0, 4.0};
    const auto b = dense_ls_oracle(eye, y, std::vector<double>(3, 0.0));
    for (std::size_t i = 0; i < 3; ++i) CHECK(b[i] == Catch::Approx(y[i]).margin(1e-14));
    const auto shrunk = dense_ls_oracle(eye, y, std::vector<double>(3, 1e12));
    for (double v : shrunk) CHECK(std::abs(v) <= 1e-3);
    linalg::Matrix rank1(3, 2, 1.0);
    CHECK_THROWS_AS(dense_ls_oracle(rank1, y, std::vector<double>(2, 0.0)), Error);
}

TEST_CASE("r squared") {
    const std::vector<double> t{1, 2, 3, 4};
    CHECK(r_squared(t, t) == 1.0);
    CHECK(r_squared(t, std::vector<double>(4, 2.5)) == 0.0);
    CHECK_THROWS_AS(r_squared(std::vector<double>(4, 1.0), t), Error);
}
