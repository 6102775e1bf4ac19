#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "cshap/execution.hpp"

// Data-parallel inner loops. Each kernel has a serial reference version and an
// OpenMP version; both write identical bytes because every output element is
// produced by exactly one iteration with a fixed operation order.
namespace cshap::kernels {

// Shapes for masked-batch assembly.
//   input_components      m × L      (component-major)
//   input_original        L
//   background_components N × m × L
//   background_originals  N × L
//   out                   N × L
struct MaskedBatchView {
    std::size_t concepts;
    std::size_t length;
    std::size_t backgrounds;
    std::span<const double> input_components;
    std::span<const double> input_original;
    std::span<const double> background_components;
    std::span<const double> background_originals;
};

// Row j of `out` is Σ_{i∈mask} input_i + Σ_{i∉mask} background_{j,i}. The full
// mask copies the input original and the empty mask copies background j's
// original; both equal the component sums by the reconstruction identity.
namespace serial {
void assemble_masked(const MaskedBatchView& view, std::uint32_t mask, std::span<double> out);
}
namespace omp {
void assemble_masked(const MaskedBatchView& view, std::uint32_t mask, std::span<double> out);
}
void assemble_masked(Execution exec, const MaskedBatchView& view, std::uint32_t mask,
                     std::span<double> out);

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept;
    double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

// x0 + Σ(x_j − x0)/N in index order; N equal inputs return that input exactly.
double shifted_mean(std::span<const double> values);

} // namespace cshap::kernels
