#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cshap/decomposer.hpp"
#include "cshap/series.hpp"
#include "cshap/shap.hpp"

namespace cshap::report {

struct GlobalReport {
    std::vector<std::string> concepts;
    std::vector<double> mean_abs_phi;
    std::size_t count = 0;
    std::string config_digest;
};

// Mean |φ_i| per concept, multiplied by `unit_scale` (σ for domain units).
GlobalReport global_report(std::span<const shap::ShapExplanation> explanations,
                           double unit_scale = 1.0, std::string config_digest = {});

struct WaterfallStep {
    std::string concept_name;
    double contribution;
};

struct WaterfallReport {
    std::string input_id;
    double base_value = 0.0;
    std::vector<WaterfallStep> steps;
    double final_value = 0.0;
};

// Domain units: φ·σ, base·σ + μ, final = base + Σφ in those units.
WaterfallReport waterfall(const shap::ShapExplanation& explanation, const series::Scaler& scaler);
// Model (scaled) units.
WaterfallReport waterfall(const shap::ShapExplanation& explanation);

struct ConceptCorrelation {
    std::string concept_name;
    std::vector<double> last_values;
    std::vector<double> phi;
    std::optional<double> pearson_r; // empty when either side has zero variance
};

struct CorrelationReport {
    std::vector<ConceptCorrelation> concepts;
};

// Pearson r; nullopt when undefined.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

// Pairs each explanation's φ_i with the last value of component i of the
// matching decomposition. With a scaler both sides are converted to domain
// units (values and φ times σ; the Growth component also gains μ).
CorrelationReport correlation_report(std::span<const shap::ShapExplanation> explanations,
                                     std::span<const decomp::Decomposition> decompositions,
                                     const std::optional<series::Scaler>& scaler = std::nullopt);

struct SvgOptions {
    std::string title;      // no <title> element when empty
    std::string units = ""; // axis annotation
    int width = 640;
    int height = 0;         // 0 picks a height from the content
};

std::string render_svg(const GlobalReport& report, const SvgOptions& options = {});
std::string render_svg(const WaterfallReport& report, const SvgOptions& options = {});
std::string render_svg(const CorrelationReport& report, const SvgOptions& options = {});

} // namespace cshap::report
