#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cshap/linalg.hpp"
#include "cshap/models.hpp"
#include "cshap/series.hpp"
#include "cshap/shap.hpp"

namespace cshap::synth {

struct Kink {
    std::size_t index;
    double slope_delta; // per sample
};

struct TrendPlant {
    double base = 0.0;
    double slope = 0.0; // per sample
    std::vector<Kink> kinks;
};

struct SeasonalPlant {
    std::string name;
    double period = 24.0;
    double amplitude = 1.0;
    double phase = 0.0; // radians
};

struct SyntheticSpec {
    std::size_t length = 0;
    TrendPlant trend;
    std::vector<SeasonalPlant> seasonal;
    double noise_std = 0.0;
    std::uint64_t seed = 0;
    series::Timestamp start = 0;
    std::int64_t step_minutes = 60;

    void validate() const;
};

struct SyntheticSeries {
    series::TimeSeries series;
    // "trend", each seasonal plant by name, then "noise"; sums to the series.
    std::vector<std::pair<std::string, std::vector<double>>> components;

    const std::vector<double>& component(const std::string& name) const;
};

SyntheticSeries generate(const SyntheticSpec& spec);

// Planted components evaluated on an explicit index range, useful for
// building single windows.
std::vector<double> planted_trend(const TrendPlant& trend, std::size_t first, std::size_t count);
std::vector<double> planted_seasonal(const SeasonalPlant& plant, std::size_t first, std::size_t count);

struct PermutationResult {
    std::vector<double> phi;
    std::vector<double> standard_error; // zeros when exhaustive
    std::size_t orderings = 0;
};

// Shapley values as the average marginal contribution over concept orderings:
// all m! of them when exhaustive (m ≤ 8), else `samples` seeded random ones.
PermutationResult permutation_shapley(const decomp::Decomposition& input,
                                      const models::ModelHandle& model,
                                      const shap::BackgroundSet& background, bool exhaustive,
                                      std::size_t samples = 0, std::uint64_t seed = 0);

inline constexpr std::size_t kMaxExhaustiveConcepts = 8;

// Penalized least squares through a QR factorization of [X; diag(√λ)],
// independent of the Cholesky normal-equation path used in production.
std::vector<double> dense_ls_oracle(const linalg::Matrix& x, std::span<const double> targets,
                                    std::span<const double> penalty);

// Coefficient of determination of `fit` against `truth`.
double r_squared(std::span<const double> truth, std::span<const double> fit);

} // namespace cshap::synth
