#include "cshap/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "cshap/error.hpp"

namespace cshap::kernels {

namespace {

void check(const MaskedBatchView& v, std::span<double> out) {
    const auto ml = v.concepts * v.length;
    if (v.input_components.size() != ml || v.input_original.size() != v.length ||
        v.background_components.size() != v.backgrounds * ml ||
        v.background_originals.size() != v.backgrounds * v.length ||
        out.size() != v.backgrounds * v.length) {
        throw Error(ErrorCode::LengthMismatch, "masked batch buffers have inconsistent shapes");
    }
}

inline void assemble_row(const MaskedBatchView& v, std::uint32_t mask, std::uint32_t full,
                         std::size_t j, double* row) {
    const auto L = v.length;
    if (mask == full) {
        std::copy_n(v.input_original.data(), L, row);
        return;
    }
    if (mask == 0) {
        std::copy_n(v.background_originals.data() + j * L, L, row);
        return;
    }
    const double* bg = v.background_components.data() + j * v.concepts * L;
    std::fill_n(row, L, 0.0);
    for (std::size_t c = 0; c < v.concepts; ++c) {
        const double* src = (mask >> c) & 1u ? v.input_components.data() + c * L : bg + c * L;
        for (std::size_t t = 0; t < L; ++t) row[t] += src[t];
    }
}

std::uint32_t full_mask(std::size_t m) {
    return m >= 32 ? ~0u : (std::uint32_t{1} << m) - 1u;
}

} // namespace

namespace serial {

void assemble_masked(const MaskedBatchView& view, std::uint32_t mask, std::span<double> out) {
    check(view, out);
    const auto full = full_mask(view.concepts);
    for (std::size_t j = 0; j < view.backgrounds; ++j) {
        assemble_row(view, mask, full, j, out.data() + j * view.length);
    }
}

} // namespace serial

namespace omp {

void assemble_masked(const MaskedBatchView& view, std::uint32_t mask, std::span<double> out) {
    check(view, out);
    const auto full = full_mask(view.concepts);
    const auto n = static_cast<std::ptrdiff_t>(view.backgrounds);
    double* base = out.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        assemble_row(view, mask, full, static_cast<std::size_t>(j),
                     base + static_cast<std::size_t>(j) * view.length);
    }
}

} // namespace omp

void assemble_masked(Execution exec, const MaskedBatchView& view, std::uint32_t mask,
                     std::span<double> out) {
    if (exec == Execution::Parallel) {
        omp::assemble_masked(view, mask, out);
    } else {
        serial::assemble_masked(view, mask, out);
    }
}

void CompensatedSum::add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        compensation_ += (sum_ - t) + x;
    } else {
        compensation_ += (x - t) + sum_;
    }
    sum_ = t;
}

double shifted_mean(std::span<const double> values) {
    if (values.empty()) {
        throw Error(ErrorCode::EmptyInput, "mean of no values");
    }
    const double x0 = values.front();
    CompensatedSum acc;
    for (double v : values) acc.add(v - x0);
    return x0 + acc.value() / static_cast<double>(values.size());
}

} // namespace cshap::kernels
