#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cshap/execution.hpp"
#include "cshap/linalg.hpp"

namespace cshap::decomp {

inline constexpr std::string_view kGrowth = "Growth";
inline constexpr std::string_view kOther = "Other";

struct SeasonalPeriod {
    std::string name;
    std::size_t period = 0;    // samples per cycle
    std::size_t harmonics = 0; // Fourier pairs
};

struct DecompositionSpec {
    std::vector<SeasonalPeriod> periods;
    std::size_t n_changepoints = 25;
    double changepoint_span = 0.8;
    double ridge_trend = 0.5;     // on changepoint slope deltas
    double ridge_seasonal = 0.01; // on Fourier coefficients

    // Daily (24, 3) and Weekly (168, 3) on hourly data.
    static DecompositionSpec hourly_defaults();

    // Throws Error{InvalidArgument} on a malformed spec.
    void validate() const;
    // Non-fatal issues, e.g. 2N >= P aliasing.
    std::vector<std::string> warnings() const;

    // Growth, seasonal names in order, Other.
    std::vector<std::string> concept_names() const;
};

enum class BlockKind { Trend, Seasonal };

struct ColumnBlock {
    std::string name;
    BlockKind kind;
    std::size_t first;
    std::size_t count;
};

struct DesignMatrix {
    linalg::Matrix matrix;
    std::vector<ColumnBlock> blocks;
    std::vector<double> changepoints; // in normalized time [0, 1]
};

// Columns: [1, t], hinges max(0, t - s_j), then cos/sin(2πk·i/P) per period,
// with t = i/(n-1) and i the within-window sample index.
DesignMatrix build_design_matrix(std::size_t n, const DecompositionSpec& spec);

// Diagonal of the ridge penalty matching build_design_matrix's columns.
std::vector<double> penalty_diagonal(const DesignMatrix& design, const DecompositionSpec& spec);

// Additive components in fixed concept order, summing to `original`.
class Decomposition {
public:
    Decomposition(std::vector<std::string> names, std::vector<std::vector<double>> components,
                  std::vector<double> original, std::vector<double> coefficients = {});

    std::size_t size() const noexcept { return components_.size(); }
    std::size_t length() const noexcept { return original_.size(); }

    const std::vector<std::string>& names() const noexcept { return names_; }
    std::span<const double> component(std::size_t i) const { return components_.at(i); }
    std::span<const double> component(std::string_view name) const;
    std::span<const double> original() const noexcept { return original_; }
    std::span<const double> coefficients() const noexcept { return coefficients_; }

private:
    std::vector<std::string> names_;
    std::vector<std::vector<double>> components_;
    std::vector<double> original_;
    std::vector<double> coefficients_;
};

// Elementwise sum of all components in order.
std::vector<double> reconstruct(const Decomposition& d);

// Largest |Σ components − original| over the window.
double reconstruction_error(const Decomposition& d);

// Penalized least-squares decomposer for a fixed window length. The factorized
// normal matrix depends only on (length, spec), so it is built once and every
// fit is a back-substitution.
class Decomposer {
public:
    Decomposer(std::size_t length, DecompositionSpec spec);

    std::size_t length() const noexcept { return length_; }
    const DecompositionSpec& spec() const noexcept { return spec_; }
    const DesignMatrix& design() const noexcept { return design_; }
    const std::vector<double>& penalty() const noexcept { return penalty_; }
    bool jittered() const noexcept { return solver_.jittered; }

    std::vector<double> solve_coefficients(std::span<const double> window) const;
    Decomposition fit(std::span<const double> window) const;

    std::vector<Decomposition> fit_all(std::span<const std::vector<double>> windows,
                                       Execution exec = Execution::Parallel) const;

private:
    std::size_t length_;
    DecompositionSpec spec_;
    DesignMatrix design_;
    std::vector<double> penalty_;
    struct Solver {
        linalg::Cholesky factor;
        bool jittered; // 1e-8 diagonal jitter was needed
    };
    Solver solver_;

    static Solver factorize(const DesignMatrix& design, const std::vector<double>& penalty);
};

Decomposition fit(std::span<const double> window, const DecompositionSpec& spec);

} // namespace cshap::decomp
