#include "cshap/shap.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "cshap/error.hpp"
#include "cshap/random.hpp"

namespace cshap::shap {

namespace {

void check_concept_count(std::size_t m) {
    if (m == 0) {
        throw Error(ErrorCode::InvalidArgument, "at least one concept required");
    }
    if (m > kMaxConcepts) {
        throw Error(ErrorCode::TooManyConcepts, std::to_string(m) + " concepts exceed the limit of " +
                                                    std::to_string(kMaxConcepts));
    }
}

std::vector<double> pack_components(const decomp::Decomposition& d) {
    std::vector<double> out;
    out.reserve(d.size() * d.length());
    for (std::size_t c = 0; c < d.size(); ++c) {
        const auto comp = d.component(c);
        out.insert(out.end(), comp.begin(), comp.end());
    }
    return out;
}

void check_compatible(const decomp::Decomposition& input, const BackgroundSet& background) {
    if (input.length() != background.length()) {
        throw Error(ErrorCode::LengthMismatch, "input window length " +
                                                   std::to_string(input.length()) +
                                                   " differs from background length " +
                                                   std::to_string(background.length()));
    }
    if (input.names() != background.concepts().names()) {
        throw Error(ErrorCode::LengthMismatch,
                    "input and background decompositions expose different concepts");
    }
}

double evaluate(const decomp::Decomposition& input, std::span<const double> input_packed,
                std::uint32_t mask, const BackgroundSet& background,
                const models::ModelHandle& model, Execution exec) {
    kernels::MaskedBatchView view{input.size(),
                                  input.length(),
                                  background.size(),
                                  input_packed,
                                  input.original(),
                                  background.packed_components(),
                                  background.packed_originals()};
    models::WindowBatch batch(input.length(), background.size());
    kernels::assemble_masked(exec, view, mask, batch.values());
    const auto predictions = model.predict(batch);
    return kernels::shifted_mean(predictions);
}

} // namespace

ConceptSet::ConceptSet(std::vector<std::string> names) : names_(std::move(names)) {
    check_concept_count(names_.size());
    for (std::size_t i = 0; i < names_.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (names_[i] == names_[j]) {
                throw Error(ErrorCode::InvalidArgument, "duplicate concept '" + names_[i] + "'");
            }
        }
    }
}

std::size_t ConceptSet::index_of(std::string_view name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) {
        throw Error(ErrorCode::InvalidArgument, "unknown concept '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - names_.begin());
}

double shapley_weight(std::size_t s, std::size_t m) {
    if (m == 0 || s >= m) {
        throw Error(ErrorCode::InvalidArgument, "shapley_weight requires 0 <= s < m");
    }
    // s!(m−s−1)!/m! = 1 / (m · C(m−1, s)); C(m−1, s) is exact in 64 bits for m ≤ 64.
    std::uint64_t binom = 1;
    const auto k = std::min(s, m - 1 - s);
    for (std::size_t i = 1; i <= k; ++i) binom = binom * (m - 1 - k + i) / i;
    return 1.0 / (static_cast<double>(m) * static_cast<double>(binom));
}

BackgroundSet::BackgroundSet(std::vector<decomp::Decomposition> decompositions,
                             std::vector<std::size_t> pool_indices, std::uint64_t seed)
    : decompositions_(std::move(decompositions)),
      pool_indices_(std::move(pool_indices)),
      seed_(seed),
      length_(decompositions_.empty() ? 0 : decompositions_.front().length()),
      concepts_(decompositions_.empty() ? throw Error(ErrorCode::InsufficientTrainingData,
                                                      "background set needs at least one window")
                                        : decompositions_.front().names()) {
    if (!pool_indices_.empty() && pool_indices_.size() != decompositions_.size()) {
        throw Error(ErrorCode::LengthMismatch, "one pool index per background window required");
    }
    components_.reserve(decompositions_.size() * concepts_.size() * length_);
    originals_.reserve(decompositions_.size() * length_);
    for (const auto& d : decompositions_) {
        if (d.length() != length_ || d.names() != concepts_.names()) {
            throw Error(ErrorCode::LengthMismatch, "background decompositions must share shape");
        }
        const auto packed = pack_components(d);
        components_.insert(components_.end(), packed.begin(), packed.end());
        originals_.insert(originals_.end(), d.original().begin(), d.original().end());
    }
}

BackgroundSet sample_background(std::span<const std::vector<double>> pool, std::size_t n,
                                std::uint64_t seed, const decomp::Decomposer& decomposer,
                                Execution exec) {
    if (n == 0) {
        throw Error(ErrorCode::InvalidArgument, "background size must be at least 1");
    }
    auto chosen = random::sample_without_replacement(pool.size(), n, seed);
    std::vector<std::vector<double>> windows;
    windows.reserve(n);
    for (auto idx : chosen) windows.push_back(pool[idx]);
    return BackgroundSet(decomposer.fit_all(windows, exec), std::move(chosen), seed);
}

double ShapExplanation::phi_of(std::string_view concept_name) const {
    for (std::size_t i = 0; i < concepts.size(); ++i) {
        if (concepts[i] == concept_name) return phi[i];
    }
    throw Error(ErrorCode::InvalidArgument, "unknown concept '" + std::string(concept_name) + "'");
}

double ShapExplanation::efficiency_gap() const {
    kernels::CompensatedSum total;
    total.add(base_value);
    for (double p : phi) total.add(p);
    return std::abs(total.value() - model_output);
}

double mask_and_predict(const decomp::Decomposition& input, Coalition coalition,
                        const BackgroundSet& background, const models::ModelHandle& model,
                        Execution exec) {
    check_compatible(input, background);
    check_concept_count(input.size());
    if (coalition.bits() > Coalition::full(input.size()).bits()) {
        throw Error(ErrorCode::InvalidArgument, "coalition references unknown concepts");
    }
    const auto packed = pack_components(input);
    return evaluate(input, packed, coalition.bits(), background, model, exec);
}

std::vector<double> coalition_values(const decomp::Decomposition& input,
                                     const BackgroundSet& background,
                                     const models::ModelHandle& model, Execution exec) {
    check_compatible(input, background);
    const auto m = input.size();
    check_concept_count(m);
    const auto packed = pack_components(input);
    const std::size_t count = std::size_t{1} << m;
    std::vector<double> values(count, 0.0);

    if (exec == Execution::Parallel && model.thread_safe()) {
        std::exception_ptr failure;
        const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t mask = 0; mask < n; ++mask) {
            try {
                values[static_cast<std::size_t>(mask)] =
                    evaluate(input, packed, static_cast<std::uint32_t>(mask), background, model,
                             Execution::Serial);
            } catch (...) {
#pragma omp critical(cshap_coalitions)
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
    } else {
        for (std::size_t mask = 0; mask < count; ++mask) {
            values[mask] =
                evaluate(input, packed, static_cast<std::uint32_t>(mask), background, model, exec);
        }
    }
    return values;
}

std::vector<double> shapley_from_values(std::span<const double> values, std::size_t m) {
    check_concept_count(m);
    if (values.size() != (std::size_t{1} << m)) {
        throw Error(ErrorCode::LengthMismatch, "expected 2^m coalition values");
    }
    std::vector<double> weights(m);
    for (std::size_t s = 0; s < m; ++s) weights[s] = shapley_weight(s, m);

    std::vector<double> phi(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const std::uint32_t bit = std::uint32_t{1} << i;
        kernels::CompensatedSum acc;
        for (std::uint32_t s = 0; s < values.size(); ++s) {
            if (s & bit) continue;
            const auto size = static_cast<std::size_t>(std::popcount(s));
            acc.add(weights[size] * (values[s | bit] - values[s]));
        }
        phi[i] = acc.value();
    }
    return phi;
}

ShapExplanation compute_shap(const decomp::Decomposition& input, const models::ModelHandle& model,
                             const BackgroundSet& background, Execution exec,
                             std::string input_id) {
    const auto values = coalition_values(input, background, model, exec);
    ShapExplanation out;
    out.input_id = std::move(input_id);
    out.concepts = input.names();
    out.phi = shapley_from_values(values, input.size());
    out.base_value = values.front();
    out.model_output = values.back();
    return out;
}

ShapExplanation compute_shap(std::span<const double> window, const models::ModelHandle& model,
                             const decomp::Decomposer& decomposer, const BackgroundSet& background,
                             Execution exec, std::string input_id) {
    return compute_shap(decomposer.fit(window), model, background, exec, std::move(input_id));
}

} // namespace cshap::shap
