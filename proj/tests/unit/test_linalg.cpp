#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cshap/linalg.hpp"
#include "cshap/random.hpp"
#include "cshap/synthetic.hpp"

using namespace cshap;
using linalg::Matrix;

TEST_CASE("penalized gram and transpose product on a small example") {
    Matrix x(3, 2);
    x(0, 0) = 1; x(0, 1) = 0;
    x(1, 0) = 1; x(1, 1) = 1;
    x(2, 0) = 1; x(2, 1) = 2;
    const std::vector<double> pen{0.0, 0.5};
    const auto g = linalg::penalized_gram(x, pen);
    CHECK(g(0, 0) == 3.0);
    CHECK(g(0, 1) == 3.0);
    CHECK(g(1, 0) == 3.0);
    CHECK(g(1, 1) == 5.5);
    const auto xty = linalg::transpose_times(x, std::vector<double>{1, 2, 4});
    CHECK(xty == std::vector<double>{7.0, 10.0});
}

TEST_CASE("cholesky solves SPD systems") {
    // [[4,2],[2,3]] z = [2,1]  ->  z = [0.5, 0].
    Matrix a(2, 2);
    a(0, 0) = 4; a(0, 1) = 2; a(1, 0) = 2; a(1, 1) = 3;
    const auto f = linalg::Cholesky::factor(a);
    REQUIRE(f);
    const auto z = f->solve(std::vector<double>{2, 1});
    CHECK(z[0] == Catch::Approx(0.5).margin(1e-15));
    CHECK(z[1] == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("cholesky reports singular and indefinite matrices") {
    Matrix singular(2, 2, 1.0);
    CHECK_FALSE(linalg::Cholesky::factor(singular));
    Matrix indefinite(2, 2);
    indefinite(0, 0) = 1; indefinite(1, 1) = -1;
    CHECK_FALSE(linalg::Cholesky::factor(indefinite));
}

TEST_CASE("normal-equation solve agrees with the QR oracle on random problems") {
    random::Engine rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 40, p = 7;
        Matrix x(n, p);
        std::vector<double> y(n), pen(p);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < p; ++c) x(r, c) = random::standard_normal(rng);
            y[r] = random::standard_normal(rng);
        }
        for (std::size_t c = 0; c < p; ++c) pen[c] = c < 2 ? 0.0 : random::uniform_unit(rng);
        const auto f = linalg::Cholesky::factor(linalg::penalized_gram(x, pen));
        REQUIRE(f);
        const auto beta = f->solve(linalg::transpose_times(x, y));
        const auto oracle = synth::dense_ls_oracle(x, y, pen);
        for (std::size_t c = 0; c < p; ++c) CHECK(std::abs(beta[c] - oracle[c]) <= 1e-10);
    }
}
