#include <catch2/catch_amalgamated.hpp>

#include <boost/rational.hpp>

#include <cmath>
#include <cstring>
#include <numeric>
#include <set>

#include "cshap/error.hpp"
#include "cshap/random.hpp"
#include "cshap/shap.hpp"
#include "cshap/synthetic.hpp"

using namespace cshap;
using namespace cshap::shap;

namespace {

using Rational = boost::rational<long long>;

decomp::Decomposition random_decomposition(std::size_t m, std::size_t L, random::Engine& rng) {
    std::vector<std::string> names;
    std::vector<std::vector<double>> comps(m, std::vector<double>(L));
    std::vector<double> orig(L, 0.0);
    for (std::size_t c = 0; c < m; ++c) {
        names.push_back("c" + std::to_string(c));
        for (std::size_t t = 0; t < L; ++t) {
            comps[c][t] = random::standard_normal(rng);
            orig[t] += comps[c][t];
        }
    }
    return decomp::Decomposition(std::move(names), std::move(comps), std::move(orig));
}

struct Game {
    decomp::Decomposition input;
    BackgroundSet bg;
};

Game random_game(std::size_t m, std::size_t L, std::size_t N, std::uint64_t seed) {
    random::Engine rng(seed);
    auto input = random_decomposition(m, L, rng);
    std::vector<decomp::Decomposition> bg;
    for (std::size_t j = 0; j < N; ++j) bg.push_back(random_decomposition(m, L, rng));
    return {std::move(input), BackgroundSet(std::move(bg))};
}

models::ModelHandle squared_sum() {
    return models::ModelHandle(
        "sq",
        [](const models::WindowBatch& b) {
            std::vector<double> out(b.size());
            for (std::size_t i = 0; i < b.size(); ++i) {
                const auto r = b.row(i);
                const double s = std::accumulate(r.begin(), r.end(), 0.0);
                out[i] = s * s;
            }
            return out;
        },
        true);
}

models::ModelHandle tanh_mix(bool thread_safe = true) {
    return models::ModelHandle(
        "tanh",
        [](const models::WindowBatch& b) {
            std::vector<double> out(b.size());
            for (std::size_t i = 0; i < b.size(); ++i) {
                const auto r = b.row(i);
                double acc = 0.0;
                for (std::size_t t = 0; t < r.size(); ++t) acc += std::tanh(r[t] * static_cast<double>(t + 1) / 4.0);
                out[i] = acc + r.back() * r.front();
            }
            return out;
        },
        thread_safe);
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no cshap::Error thrown");
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST_CASE("shapley weights") {
    CHECK(shapley_weight(0, 2) == 0.5);
    CHECK(shapley_weight(2, 3) == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(shapley_weight(0, 1) == 1.0);
    CHECK_THROWS_AS(shapley_weight(3, 3), Error);
}

TEST_CASE("weights sum to one, checked against exact rationals") {
    for (std::size_t m = 1; m <= 12; ++m) {
        Rational exact_total = 0;
        double total = 0.0;
        long long binom = 1; // C(m-1, s)
        for (std::size_t s = 0; s < m; ++s) {
            // s!(m-s-1)!/m!
            long long num = 1, den = 1;
            for (std::size_t k = 2; k <= s; ++k) num *= static_cast<long long>(k);
            for (std::size_t k = 2; k <= m - s - 1; ++k) num *= static_cast<long long>(k);
            for (std::size_t k = 2; k <= m; ++k) den *= static_cast<long long>(k);
            const Rational w(num, den);
            CHECK(shapley_weight(s, m) == Catch::Approx(boost::rational_cast<double>(w)).epsilon(1e-15));
            exact_total += w * binom;
            total += static_cast<double>(binom) * shapley_weight(s, m);
            binom = binom * static_cast<long long>(m - 1 - s) / static_cast<long long>(s + 1);
        }
        CHECK(exact_total == Rational(1));
        CHECK(std::abs(total - 1.0) <= 1e-12);
    }
}

TEST_CASE("concept sets and coalitions") {
    const ConceptSet c({"Growth", "Daily", "Weekly", "Other"});
    CHECK(c.index_of("Weekly") == 2);
    CHECK(code_of([&] { c.index_of("Yearly"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { ConceptSet({"a", "a"}); }) == ErrorCode::InvalidArgument);
    std::vector<std::string> many;
    for (int i = 0; i < 21; ++i) many.push_back("c" + std::to_string(i));
    CHECK(code_of([&] { ConceptSet{many}; }) == ErrorCode::TooManyConcepts);
    CHECK(Coalition::full(4).bits() == 0xF);
    CHECK(Coalition(0b0101).contains(2));
    CHECK_FALSE(Coalition(0b0101).contains(1));
    CHECK(Coalition(0b0101).with(1).size() == 3);
}

TEST_CASE("full and empty coalition values") {
    const auto g = random_game(4, 12, 7, 1);
    const auto f = tanh_mix();
    CHECK(mask_and_predict(g.input, Coalition::full(4), g.bg, f) == f.predict_one(g.input.original()));
    double mean = 0.0;
    for (std::size_t j = 0; j < g.bg.size(); ++j) mean += f.predict_one(g.bg.decomposition(j).original());
    mean /= static_cast<double>(g.bg.size());
    CHECK(mask_and_predict(g.input, Coalition(0), g.bg, f) == Catch::Approx(mean).epsilon(1e-14));
}

TEST_CASE("persistence coalition value has a closed form") {
    const auto g = random_game(4, 10, 9, 2);
    const auto f = models::persistence();
    for (std::uint32_t bits = 0; bits < 16; ++bits) {
        double expected = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            if ((bits >> i) & 1u) {
                expected += g.input.component(i).back();
            } else {
                double s = 0.0;
                for (std::size_t j = 0; j < g.bg.size(); ++j) s += g.bg.decomposition(j).component(i).back();
                expected += s / static_cast<double>(g.bg.size());
            }
        }
        CHECK(std::abs(mask_and_predict(g.input, Coalition(bits), g.bg, f) - expected) <= 1e-12);
    }
}

TEST_CASE("single concept: phi is output minus base") {
    const auto g = random_game(1, 8, 5, 3);
    const auto e = compute_shap(g.input, tanh_mix(), g.bg);
    REQUIRE(e.phi.size() == 1);
    CHECK(e.phi[0] == e.model_output - e.base_value);
}

TEST_CASE("persistence phi equals the marginal difference") {
    const auto g = random_game(5, 10, 11, 4);
    const auto e = compute_shap(g.input, models::persistence(), g.bg);
    for (std::size_t i = 0; i < 5; ++i) {
        double bg = 0.0;
        for (std::size_t j = 0; j < g.bg.size(); ++j) bg += g.bg.decomposition(j).component(i).back();
        CHECK(std::abs(e.phi[i] - (g.input.component(i).back() - bg / static_cast<double>(g.bg.size()))) <= 1e-12);
    }
}

TEST_CASE("exactly 2^m batched model calls per explanation") {
    for (std::size_t m = 1; m <= 6; ++m) {
        const auto g = random_game(m, 6, 4, 10 + m);
        for (auto exec : {Execution::Serial, Execution::Parallel}) {
            for (bool safe : {true, false}) {
                const auto f = tanh_mix(safe);
                compute_shap(g.input, f, g.bg, exec);
                CHECK(f.batch_calls() == (std::uint64_t{1} << m));
            }
        }
    }
}

TEST_CASE("efficiency on random nonlinear games") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto m = 1 + seed % 7;
        const auto g = random_game(m, 9, 6, 100 + seed);
        for (const auto& f : {tanh_mix(), squared_sum()}) {
            const auto e = compute_shap(g.input, f, g.bg);
            CHECK(e.efficiency_gap() <= 1e-9 * std::max(1.0, std::abs(e.model_output)));
        }
    }
}

TEST_CASE("linearity in the model") {
    const auto g = random_game(4, 9, 6, 7);
    const double a = 1.7, b = -0.4;
    const auto f = tanh_mix();
    const auto h = squared_sum();
    const models::ModelHandle combo(
        "combo",
        [&](const models::WindowBatch& batch) {
            auto x = f.predict(batch);
            const auto y = h.predict(batch);
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = a * x[i] + b * y[i];
            return x;
        },
        true);
    const auto ef = compute_shap(g.input, f, g.bg);
    const auto eh = compute_shap(g.input, h, g.bg);
    const auto ec = compute_shap(g.input, combo, g.bg);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(ec.phi[i] - (a * ef.phi[i] + b * eh.phi[i])) <= 1e-9);
}

TEST_CASE("enumeration equals the permutation definition for m = 1..6") {
    for (std::size_t m = 1; m <= 6; ++m) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto g = random_game(m, 8, 5, 1000 * m + seed);
            for (const auto& f : {tanh_mix(), squared_sum()}) {
                const auto e = compute_shap(g.input, f, g.bg);
                const auto p = synth::permutation_shapley(g.input, f, g.bg, true);
                for (std::size_t i = 0; i < m; ++i) REQUIRE(std::abs(e.phi[i] - p.phi[i]) <= 1e-9);
            }
        }
    }
}

TEST_CASE("serial and parallel explanations are bit-identical") {
    const auto g = random_game(4, 168, 100, 9);
    for (bool safe : {true, false}) {
        const auto s = compute_shap(g.input, tanh_mix(safe), g.bg, Execution::Serial);
        const auto p = compute_shap(g.input, tanh_mix(safe), g.bg, Execution::Parallel);
        REQUIRE(std::memcmp(s.phi.data(), p.phi.data(), s.phi.size() * sizeof(double)) == 0);
        CHECK(s.base_value == p.base_value);
    }
}

TEST_CASE("shapley_from_values on a hand-computed game") {
    // v(∅)=0, v({0})=1, v({1})=2, v({0,1})=5: φ0 = ½(1) + ½(3) = 2, φ1 = ½(2) + ½(4) = 3.
    const auto phi = shapley_from_values(std::vector<double>{0, 1, 2, 5}, 2);
    CHECK(phi[0] == 2.0);
    CHECK(phi[1] == 3.0);
    CHECK_THROWS_AS(shapley_from_values(std::vector<double>{0, 1, 2}, 2), Error);
}

TEST_CASE("background sampling") {
    random::Engine rng(5);
    std::vector<std::vector<double>> pool(30, std::vector<double>(168));
    for (auto& w : pool)
        for (auto& v : w) v = random::standard_normal(rng);
    const decomp::Decomposer dec(168, decomp::DecompositionSpec::hourly_defaults());
    const auto a = sample_background(pool, 10, 77, dec);
    const auto b = sample_background(pool, 10, 77, dec);
    CHECK(a.pool_indices() == b.pool_indices());
    CHECK(a.seed() == 77);
    auto sorted = a.pool_indices();
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    CHECK(sample_background(pool, 10, 78, dec).pool_indices() != a.pool_indices());
    const auto whole = sample_background(pool, 30, 1, dec);
    auto all = whole.pool_indices();
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);
    CHECK(code_of([&] { sample_background(pool, 31, 1, dec); }) == ErrorCode::InsufficientTrainingData);
    // Packed layout: background j, concept c, time t.
    const auto& d3 = a.decomposition(3);
    CHECK(a.packed_components()[(3 * 4 + 2) * 168 + 5] == d3.component(2)[5]);
    CHECK(a.packed_originals()[3 * 168 + 5] == d3.original()[5]);

    std::vector<std::vector<double>> big(4575, std::vector<double>(168, 0.0));
    for (std::size_t i = 0; i < big.size(); ++i) big[i][0] = static_cast<double>(i);
    const auto hundred = sample_background(big, 100, 0, dec);
    std::set<std::size_t> unique(hundred.pool_indices().begin(), hundred.pool_indices().end());
    CHECK(unique.size() == 100);
}

TEST_CASE("input validation") {
    const auto g = random_game(3, 8, 4, 1);
    random::Engine rng(1);
    const auto other_shape = random_decomposition(2, 8, rng);
    CHECK(code_of([&] { compute_shap(other_shape, tanh_mix(), g.bg); }) == ErrorCode::LengthMismatch);
    const auto shorter = random_decomposition(3, 7, rng);
    CHECK(code_of([&] { compute_shap(shorter, tanh_mix(), g.bg); }) == ErrorCode::LengthMismatch);
    CHECK(code_of([] { BackgroundSet({}); }) == ErrorCode::InsufficientTrainingData);
    const auto e = compute_shap(g.input, tanh_mix(), g.bg, Execution::Serial, "test:3");
    CHECK(e.input_id == "test:3");
    CHECK(e.phi_of("c1") == e.phi[1]);
    CHECK(code_of([&] { e.phi_of("zz"); }) == ErrorCode::InvalidArgument);
}
