#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cshap/decomposer.hpp"
#include "cshap/execution.hpp"
#include "cshap/kernels.hpp"
#include "cshap/models.hpp"

namespace cshap::shap {

// Exact enumeration visits 2^m coalitions.
inline constexpr std::size_t kMaxConcepts = 20;

class ConceptSet {
public:
    explicit ConceptSet(std::vector<std::string> names);

    std::size_t size() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::size_t index_of(std::string_view name) const;

private:
    std::vector<std::string> names_;
};

// Subset of concepts left unmasked; bit i stands for concept i.
class Coalition {
public:
    constexpr explicit Coalition(std::uint32_t bits = 0) noexcept : bits_(bits) {}

    static constexpr Coalition full(std::size_t m) noexcept {
        return Coalition((std::uint32_t{1} << m) - 1u);
    }

    constexpr std::uint32_t bits() const noexcept { return bits_; }
    constexpr bool contains(std::size_t i) const noexcept { return (bits_ >> i) & 1u; }
    constexpr Coalition with(std::size_t i) const noexcept {
        return Coalition(bits_ | (std::uint32_t{1} << i));
    }
    constexpr std::size_t size() const noexcept {
        return static_cast<std::size_t>(std::popcount(bits_));
    }
    constexpr bool operator==(const Coalition&) const noexcept = default;

private:
    std::uint32_t bits_;
};

// s!(m−s−1)!/m!, the weight of a size-s coalition in a game of m players.
double shapley_weight(std::size_t s, std::size_t m);

// Background windows with their decompositions cached once, packed into the
// contiguous layout the masking kernels read.
class BackgroundSet {
public:
    explicit BackgroundSet(std::vector<decomp::Decomposition> decompositions,
                           std::vector<std::size_t> pool_indices = {}, std::uint64_t seed = 0);

    std::size_t size() const noexcept { return decompositions_.size(); }
    std::size_t length() const noexcept { return length_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const ConceptSet& concepts() const noexcept { return concepts_; }
    const decomp::Decomposition& decomposition(std::size_t j) const { return decompositions_.at(j); }
    std::span<const decomp::Decomposition> decompositions() const noexcept { return decompositions_; }
    // Positions of the chosen windows in the pool they were sampled from.
    const std::vector<std::size_t>& pool_indices() const noexcept { return pool_indices_; }

    std::span<const double> packed_components() const noexcept { return components_; }
    std::span<const double> packed_originals() const noexcept { return originals_; }

private:
    std::vector<decomp::Decomposition> decompositions_;
    std::vector<std::size_t> pool_indices_;
    std::uint64_t seed_;
    std::size_t length_;
    ConceptSet concepts_;
    std::vector<double> components_;
    std::vector<double> originals_;
};

// Uniform draw of n pool windows without replacement, reproducible from seed.
BackgroundSet sample_background(std::span<const std::vector<double>> pool, std::size_t n,
                                std::uint64_t seed, const decomp::Decomposer& decomposer,
                                Execution exec = Execution::Parallel);

struct ShapExplanation {
    std::string input_id;
    std::vector<std::string> concepts;
    std::vector<double> phi;
    double base_value = 0.0;
    double model_output = 0.0;

    double phi_of(std::string_view concept_name) const;
    // |base + Σφ − output|
    double efficiency_gap() const;
};

// Mean model output over the N background substitutions for one coalition,
// evaluated as a single batch call.
double mask_and_predict(const decomp::Decomposition& input, Coalition coalition,
                        const BackgroundSet& background, const models::ModelHandle& model,
                        Execution exec = Execution::Parallel);

// All 2^m coalition values, indexed by coalition bits. Exactly one batch call
// per coalition.
std::vector<double> coalition_values(const decomp::Decomposition& input,
                                     const BackgroundSet& background,
                                     const models::ModelHandle& model,
                                     Execution exec = Execution::Parallel);

// φ_i = Σ_{S ⊆ C∖{i}} w(|S|, m)·[v(S ∪ {i}) − v(S)], accumulated in ascending
// coalition order with compensated summation.
std::vector<double> shapley_from_values(std::span<const double> values, std::size_t m);

ShapExplanation compute_shap(const decomp::Decomposition& input, const models::ModelHandle& model,
                             const BackgroundSet& background, Execution exec = Execution::Parallel,
                             std::string input_id = {});

ShapExplanation compute_shap(std::span<const double> window, const models::ModelHandle& model,
                             const decomp::Decomposer& decomposer, const BackgroundSet& background,
                             Execution exec = Execution::Parallel, std::string input_id = {});

} // namespace cshap::shap
