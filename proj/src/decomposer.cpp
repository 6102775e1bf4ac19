#include "cshap/decomposer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "cshap/error.hpp"

namespace cshap::decomp {

DecompositionSpec DecompositionSpec::hourly_defaults() {
    DecompositionSpec spec;
    spec.periods = {{"Daily", 24, 3}, {"Weekly", 168, 3}};
    return spec;
}

void DecompositionSpec::validate() const {
    const auto fail = [](const std::string& what) {
        throw Error(ErrorCode::InvalidArgument, "decomposition spec: " + what);
    };
    if (!(changepoint_span > 0.0 && changepoint_span <= 1.0)) fail("changepoint_span must lie in (0, 1]");
    if (!(ridge_trend >= 0.0) || !(ridge_seasonal >= 0.0)) fail("penalties must be nonnegative");
    std::vector<std::string> seen{std::string(kGrowth), std::string(kOther)};
    for (const auto& p : periods) {
        if (p.period < 2) fail("period '" + p.name + "' must span at least 2 samples");
        if (p.harmonics < 1) fail("period '" + p.name + "' needs at least one harmonic");
        if (p.name.empty()) fail("period names must be non-empty");
        if (std::find(seen.begin(), seen.end(), p.name) != seen.end()) {
            fail("duplicate component name '" + p.name + "'");
        }
        seen.push_back(p.name);
    }
}

std::vector<std::string> DecompositionSpec::warnings() const {
    std::vector<std::string> out;
    for (const auto& p : periods) {
        if (2 * p.harmonics >= p.period) {
            out.push_back("period '" + p.name + "': 2*harmonics >= period aliases the Fourier basis");
        }
    }
    return out;
}

std::vector<std::string> DecompositionSpec::concept_names() const {
    std::vector<std::string> names{std::string(kGrowth)};
    for (const auto& p : periods) names.push_back(p.name);
    names.emplace_back(kOther);
    return names;
}

DesignMatrix build_design_matrix(std::size_t n, const DecompositionSpec& spec) {
    if (n < 2) {
        throw Error(ErrorCode::WindowTooShort, "design matrix needs at least 2 rows");
    }
    std::size_t cols = 2 + spec.n_changepoints;
    for (const auto& p : spec.periods) cols += 2 * p.harmonics;

    DesignMatrix design{linalg::Matrix(n, cols), {}, {}};
    for (std::size_t j = 1; j <= spec.n_changepoints; ++j) {
        design.changepoints.push_back(spec.changepoint_span * static_cast<double>(j) /
                                      static_cast<double>(spec.n_changepoints + 1));
    }
    design.blocks.push_back({std::string(kGrowth), BlockKind::Trend, 0, 2 + spec.n_changepoints});

    auto& x = design.matrix;
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / denom;
        x(i, 0) = 1.0;
        x(i, 1) = t;
        for (std::size_t j = 0; j < spec.n_changepoints; ++j) {
            x(i, 2 + j) = std::max(0.0, t - design.changepoints[j]);
        }
    }
    std::size_t col = 2 + spec.n_changepoints;
    for (const auto& p : spec.periods) {
        design.blocks.push_back({p.name, BlockKind::Seasonal, col, 2 * p.harmonics});
        for (std::size_t k = 1; k <= p.harmonics; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) *
                                     static_cast<double>(i) / static_cast<double>(p.period);
                x(i, col) = std::cos(angle);
                x(i, col + 1) = std::sin(angle);
            }
            col += 2;
        }
    }
    return design;
}

std::vector<double> penalty_diagonal(const DesignMatrix& design, const DecompositionSpec& spec) {
    std::vector<double> penalty(design.matrix.cols(), 0.0);
    for (const auto& block : design.blocks) {
        if (block.kind == BlockKind::Trend) {
            // Intercept and base slope stay unpenalized.
            for (std::size_t c = block.first + 2; c < block.first + block.count; ++c) {
                penalty[c] = spec.ridge_trend;
            }
        } else {
            for (std::size_t c = block.first; c < block.first + block.count; ++c) {
                penalty[c] = spec.ridge_seasonal;
            }
        }
    }
    return penalty;
}

Decomposition::Decomposition(std::vector<std::string> names,
                             std::vector<std::vector<double>> components,
                             std::vector<double> original, std::vector<double> coefficients)
    : names_(std::move(names)),
      components_(std::move(components)),
      original_(std::move(original)),
      coefficients_(std::move(coefficients)) {
    if (names_.size() != components_.size()) {
        throw Error(ErrorCode::LengthMismatch, "one name per component required");
    }
    for (const auto& c : components_) {
        if (c.size() != original_.size()) {
            throw Error(ErrorCode::LengthMismatch, "component length differs from original");
        }
    }
}

std::span<const double> Decomposition::component(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return components_[i];
    }
    throw Error(ErrorCode::InvalidArgument, "no component named '" + std::string(name) + "'");
}

std::vector<double> reconstruct(const Decomposition& d) {
    std::vector<double> out(d.length(), 0.0);
    for (std::size_t c = 0; c < d.size(); ++c) {
        const auto comp = d.component(c);
        for (std::size_t t = 0; t < out.size(); ++t) out[t] += comp[t];
    }
    return out;
}

double reconstruction_error(const Decomposition& d) {
    const auto sum = reconstruct(d);
    const auto orig = d.original();
    double worst = 0.0;
    for (std::size_t t = 0; t < sum.size(); ++t) worst = std::max(worst, std::abs(sum[t] - orig[t]));
    return worst;
}

namespace {

std::size_t minimum_length(const DecompositionSpec& spec) {
    std::size_t max_harmonics = 0;
    for (const auto& p : spec.periods) max_harmonics = std::max(max_harmonics, p.harmonics);
    return std::max<std::size_t>(2, 2 * max_harmonics + 2);
}

DesignMatrix checked_design(std::size_t length, const DecompositionSpec& spec) {
    spec.validate();
    if (length < minimum_length(spec)) {
        throw Error(ErrorCode::WindowTooShort, "window of " + std::to_string(length) +
                                                   " samples is shorter than " +
                                                   std::to_string(minimum_length(spec)));
    }
    return build_design_matrix(length, spec);
}

} // namespace

Decomposer::Solver Decomposer::factorize(const DesignMatrix& design,
                                         const std::vector<double>& penalty) {
    auto gram = linalg::penalized_gram(design.matrix, penalty);
    if (auto f = linalg::Cholesky::factor(gram)) return {std::move(*f), false};
    for (std::size_t i = 0; i < gram.rows(); ++i) gram(i, i) += 1e-8;
    if (auto f = linalg::Cholesky::factor(gram)) return {std::move(*f), true};
    throw Error(ErrorCode::SingularSystem,
                "penalized normal equations singular even after 1e-8 diagonal jitter");
}

Decomposer::Decomposer(std::size_t length, DecompositionSpec spec)
    : length_(length),
      spec_(std::move(spec)),
      design_(checked_design(length_, spec_)),
      penalty_(penalty_diagonal(design_, spec_)),
      solver_(factorize(design_, penalty_)) {}

std::vector<double> Decomposer::solve_coefficients(std::span<const double> window) const {
    if (window.size() != length_) {
        throw Error(ErrorCode::LengthMismatch, "decomposer built for length " +
                                                   std::to_string(length_) + ", got " +
                                                   std::to_string(window.size()));
    }
    return solver_.factor.solve(linalg::transpose_times(design_.matrix, window));
}

Decomposition Decomposer::fit(std::span<const double> window) const {
    auto beta = solve_coefficients(window);
    const auto& x = design_.matrix;

    std::vector<std::string> names;
    std::vector<std::vector<double>> components;
    std::vector<double> other(window.begin(), window.end());
    for (const auto& block : design_.blocks) {
        std::vector<double> part(length_, 0.0);
        for (std::size_t i = 0; i < length_; ++i) {
            const auto row = x.row(i);
            double s = 0.0;
            for (std::size_t c = block.first; c < block.first + block.count; ++c) s += row[c] * beta[c];
            part[i] = s;
            other[i] -= s;
        }
        names.push_back(block.name);
        components.push_back(std::move(part));
    }
    names.emplace_back(kOther);
    components.push_back(std::move(other));
    return Decomposition(std::move(names), std::move(components),
                         std::vector<double>(window.begin(), window.end()), std::move(beta));
}

std::vector<Decomposition> Decomposer::fit_all(std::span<const std::vector<double>> windows,
                                               Execution exec) const {
    std::vector<std::optional<Decomposition>> slots(windows.size());
    const auto count = static_cast<std::ptrdiff_t>(windows.size());
    if (exec == Execution::Parallel) {
        // Exceptions must not escape the parallel region; first one is rethrown.
        std::exception_ptr failure;
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t w = 0; w < count; ++w) {
            try {
                slots[static_cast<std::size_t>(w)].emplace(fit(windows[static_cast<std::size_t>(w)]));
            } catch (...) {
#pragma omp critical(cshap_fit_all)
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
    } else {
        for (std::ptrdiff_t w = 0; w < count; ++w) {
            slots[static_cast<std::size_t>(w)].emplace(fit(windows[static_cast<std::size_t>(w)]));
        }
    }
    std::vector<Decomposition> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

Decomposition fit(std::span<const double> window, const DecompositionSpec& spec) {
    return Decomposer(window.size(), spec).fit(window);
}

} // namespace cshap::decomp
