#include "cshap/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cshap/error.hpp"
#include "cshap/kernels.hpp"

namespace cshap::report {

GlobalReport global_report(std::span<const shap::ShapExplanation> explanations, double unit_scale,
                           std::string config_digest) {
    if (explanations.empty()) {
        throw Error(ErrorCode::EmptyInput, "global report needs at least one explanation");
    }
    GlobalReport out;
    out.concepts = explanations.front().concepts;
    out.count = explanations.size();
    out.config_digest = std::move(config_digest);
    std::vector<kernels::CompensatedSum> sums(out.concepts.size());
    for (const auto& e : explanations) {
        if (e.concepts != out.concepts) {
            throw Error(ErrorCode::LengthMismatch, "explanations cover different concepts");
        }
        for (std::size_t i = 0; i < e.phi.size(); ++i) sums[i].add(std::abs(e.phi[i]));
    }
    for (const auto& s : sums) {
        out.mean_abs_phi.push_back(std::abs(unit_scale) * s.value() /
                                   static_cast<double>(out.count));
    }
    return out;
}

namespace {

WaterfallReport make_waterfall(const shap::ShapExplanation& e, double scale, double shift) {
    WaterfallReport out;
    out.input_id = e.input_id;
    out.base_value = e.base_value * scale + shift;
    kernels::CompensatedSum total;
    total.add(out.base_value);
    for (std::size_t i = 0; i < e.concepts.size(); ++i) {
        const double c = e.phi[i] * scale;
        out.steps.push_back({e.concepts[i], c});
        total.add(c);
    }
    out.final_value = total.value();
    return out;
}

} // namespace

WaterfallReport waterfall(const shap::ShapExplanation& explanation, const series::Scaler& scaler) {
    return make_waterfall(explanation, scaler.std(), scaler.mean());
}

WaterfallReport waterfall(const shap::ShapExplanation& explanation) {
    return make_waterfall(explanation, 1.0, 0.0);
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw Error(ErrorCode::LengthMismatch, "pearson: series differ in length");
    }
    if (x.size() < 2) return std::nullopt;
    const auto n = static_cast<double>(x.size());
    kernels::CompensatedSum sx, sy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx.add(x[i]);
        sy.add(y[i]);
    }
    const double mx = sx.value() / n;
    const double my = sy.value() / n;
    kernels::CompensatedSum sxy, sxx, syy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy.add(dx * dy);
        sxx.add(dx * dx);
        syy.add(dy * dy);
    }
    // Relative threshold: rounding noise in a constant series is not variance.
    const auto degenerate = [](double ss, double mean, double count) {
        return !(ss > 1e-24 * std::max(1.0, mean * mean) * count);
    };
    if (degenerate(sxx.value(), mx, n) || degenerate(syy.value(), my, n)) return std::nullopt;
    const double r = sxy.value() / std::sqrt(sxx.value() * syy.value());
    return std::clamp(r, -1.0, 1.0);
}

CorrelationReport correlation_report(std::span<const shap::ShapExplanation> explanations,
                                     std::span<const decomp::Decomposition> decompositions,
                                     const std::optional<series::Scaler>& scaler) {
    if (explanations.size() != decompositions.size()) {
        throw Error(ErrorCode::LengthMismatch, "one decomposition per explanation required");
    }
    if (explanations.empty()) {
        throw Error(ErrorCode::EmptyInput, "correlation report needs at least one explanation");
    }
    const double scale = scaler ? scaler->std() : 1.0;
    CorrelationReport out;
    for (const auto& name : explanations.front().concepts) {
        const double shift = scaler && name == decomp::kGrowth ? scaler->mean() : 0.0;
        ConceptCorrelation c;
        c.concept_name = name;
        for (std::size_t k = 0; k < explanations.size(); ++k) {
            c.last_values.push_back(decompositions[k].component(name).back() * scale + shift);
            c.phi.push_back(explanations[k].phi_of(name) * scale);
        }
        c.pearson_r = pearson(c.last_values, c.phi);
        out.concepts.push_back(std::move(c));
    }
    return out;
}

// ---------------------------------------------------------------------------
// SVG rendering. Output is a pure function of the report: fixed-precision
// number formatting and no clocks or ids.

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%+.4g", v);
    return buf;
}

std::string plain(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

constexpr const char* kPositive = "#ff0051";
constexpr const char* kNegative = "#008bfb";
constexpr const char* kBar = "#1f77b4";

std::string open_svg(int width, int height, const SvgOptions& options) {
    std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
         std::to_string(width) + " " + std::to_string(height) + "\">\n";
    if (!options.title.empty()) {
        s += "<title>" + escape(options.title) + "</title>\n";
        s += "<text x=\"" + std::to_string(width / 2) +
             "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
             escape(options.title) + "</text>\n";
    }
    s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) + "\" height=\"" +
         std::to_string(height) + "\" fill=\"none\"/>\n";
    return s;
}

int header_height(const SvgOptions& options) { return options.title.empty() ? 10 : 36; }

} // namespace

std::string render_svg(const GlobalReport& report, const SvgOptions& options) {
    constexpr int kRow = 34;
    constexpr int kLabel = 110;
    const int top = header_height(options);
    const int width = options.width;
    const int rows = static_cast<int>(report.concepts.size());
    const int height = options.height > 0 ? options.height : top + rows * kRow + 40;
    const double area = width - kLabel - 90;
    const double max_value = report.mean_abs_phi.empty()
                                 ? 0.0
                                 : *std::max_element(report.mean_abs_phi.begin(),
                                                     report.mean_abs_phi.end());

    std::string s = open_svg(width, height, options);
    s += "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (int i = 0; i < rows; ++i) {
        const double v = report.mean_abs_phi[static_cast<std::size_t>(i)];
        const double len = max_value > 0.0 ? area * v / max_value : 0.0;
        const double y = top + i * kRow;
        s += "<text x=\"" + std::to_string(kLabel - 8) + "\" y=\"" + num(y + 17) +
             "\" text-anchor=\"end\">" + escape(report.concepts[static_cast<std::size_t>(i)]) +
             "</text>\n";
        s += "<rect class=\"bar\" x=\"" + std::to_string(kLabel) + "\" y=\"" + num(y + 4) +
             "\" width=\"" + num(len) + "\" height=\"20\" fill=\"" + kBar + "\"/>\n";
        s += "<text x=\"" + num(kLabel + len + 6) + "\" y=\"" + num(y + 17) + "\">" + plain(v) +
             "</text>\n";
    }
    const double axis_y = top + rows * kRow + 6;
    s += "<line x1=\"" + std::to_string(kLabel) + "\" y1=\"" + num(axis_y) + "\" x2=\"" +
         num(kLabel + area) + "\" y2=\"" + num(axis_y) + "\" stroke=\"#333\"/>\n";
    std::string caption = "mean |SHAP value|";
    if (!options.units.empty()) caption += " (" + options.units + ")";
    s += "<text x=\"" + num(kLabel + area / 2) + "\" y=\"" + num(axis_y + 20) +
         "\" text-anchor=\"middle\">" + escape(caption) + "</text>\n";
    s += "</g>\n</svg>\n";
    return s;
}

std::string render_svg(const WaterfallReport& report, const SvgOptions& options) {
    constexpr int kRow = 34;
    constexpr int kLabel = 110;
    const int top = header_height(options) + 24;
    const int width = options.width;
    const int rows = static_cast<int>(report.steps.size());
    const int height = options.height > 0 ? options.height : top + rows * kRow + 56;
    const double left = kLabel + 20;
    const double right = width - 40;

    double lo = report.base_value;
    double hi = report.base_value;
    double running = report.base_value;
    for (const auto& step : report.steps) {
        running += step.contribution;
        lo = std::min(lo, running);
        hi = std::max(hi, running);
    }
    if (hi - lo <= 0.0) {
        lo -= 1.0;
        hi += 1.0;
    }
    const auto xpos = [&](double v) { return left + (v - lo) / (hi - lo) * (right - left); };

    std::string s = open_svg(width, height, options);
    s += "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    const double bottom = top + rows * kRow;
    s += "<line class=\"base\" x1=\"" + num(xpos(report.base_value)) + "\" y1=\"" + num(top - 6) +
         "\" x2=\"" + num(xpos(report.base_value)) + "\" y2=\"" + num(bottom) +
         "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    s += "<text x=\"" + num(xpos(report.base_value)) + "\" y=\"" + num(top - 10) +
         "\" text-anchor=\"middle\">base " + plain(report.base_value) + "</text>\n";

    running = report.base_value;
    for (int i = 0; i < rows; ++i) {
        const auto& step = report.steps[static_cast<std::size_t>(i)];
        const double from = running;
        const double to = running + step.contribution;
        running = to;
        const double y = top + i * kRow + 6;
        const double x0 = xpos(from);
        const double x1 = xpos(to);
        const double dir = x1 >= x0 ? 1.0 : -1.0;
        const double head = std::min(8.0, std::abs(x1 - x0));
        const double neck = x1 - dir * head;
        const char* color = step.contribution >= 0.0 ? kPositive : kNegative;
        s += "<text x=\"" + std::to_string(kLabel) + "\" y=\"" + num(y + 15) +
             "\" text-anchor=\"end\">" + escape(step.concept_name) + "</text>\n";
        s += "<polygon class=\"arrow\" points=\"" + num(x0) + "," + num(y) + " " + num(neck) + "," +
             num(y) + " " + num(x1) + "," + num(y + 10) + " " + num(neck) + "," + num(y + 20) +
             " " + num(x0) + "," + num(y + 20) + "\" fill=\"" + color + "\"/>\n";
        const double tx = std::max(x0, x1) + 6;
        s += "<text x=\"" + num(tx) + "\" y=\"" + num(y + 15) + "\">" + label(step.contribution) +
             "</text>\n";
    }
    s += "<line class=\"final\" x1=\"" + num(xpos(report.final_value)) + "\" y1=\"" + num(top) +
         "\" x2=\"" + num(xpos(report.final_value)) + "\" y2=\"" + num(bottom + 6) +
         "\" stroke=\"#333\" stroke-dasharray=\"4 3\"/>\n";
    std::string caption = "f(x) = " + plain(report.final_value);
    if (!options.units.empty()) caption += " " + options.units;
    s += "<text x=\"" + num(xpos(report.final_value)) + "\" y=\"" + num(bottom + 22) +
         "\" text-anchor=\"middle\">" + escape(caption) + "</text>\n";
    s += "</g>\n</svg>\n";
    return s;
}

std::string render_svg(const CorrelationReport& report, const SvgOptions& options) {
    const int panels = static_cast<int>(report.concepts.size());
    const int columns = std::max(1, std::min(panels, 4));
    const int grid_rows = panels == 0 ? 0 : (panels + columns - 1) / columns;
    const int top = header_height(options);
    const double panel_w = static_cast<double>(options.width) / columns;
    constexpr double kPanelH = 220.0;
    const int height = options.height > 0 ? options.height
                                          : top + static_cast<int>(grid_rows * kPanelH) + 10;

    std::string s = open_svg(options.width, height, options);
    s += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int p = 0; p < panels; ++p) {
        const auto& c = report.concepts[static_cast<std::size_t>(p)];
        const double ox = (p % columns) * panel_w;
        const double oy = top + (p / columns) * kPanelH;
        const double x0 = ox + 40, x1 = ox + panel_w - 10;
        const double y0 = oy + 30, y1 = oy + kPanelH - 35;

        const auto range = [](const std::vector<double>& v) {
            if (v.empty()) return std::pair{-1.0, 1.0};
            auto [mn, mx] = std::minmax_element(v.begin(), v.end());
            double lo = *mn, hi = *mx;
            if (hi - lo <= 0.0) {
                lo -= 1.0;
                hi += 1.0;
            }
            return std::pair{lo, hi};
        };
        const auto [xl, xh] = range(c.last_values);
        const auto [yl, yh] = range(c.phi);

        s += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(oy + 18) +
             "\" text-anchor=\"middle\" font-size=\"13\">" + escape(c.concept_name) + " (r = " +
             (c.pearson_r ? plain(*c.pearson_r) : std::string("n/a")) + ")</text>\n";
        s += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + num(x1 - x0) +
             "\" height=\"" + num(y1 - y0) + "\" fill=\"none\" stroke=\"#333\"/>\n";
        for (std::size_t k = 0; k < c.phi.size(); ++k) {
            const double px = x0 + (c.last_values[k] - xl) / (xh - xl) * (x1 - x0);
            const double py = y1 - (c.phi[k] - yl) / (yh - yl) * (y1 - y0);
            s += "<circle cx=\"" + num(px) + "\" cy=\"" + num(py) + "\" r=\"2.5\" fill=\"" +
                 (c.phi[k] >= 0.0 ? kPositive : kNegative) + "\"/>\n";
        }
        s += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(y1 + 16) +
             "\" text-anchor=\"middle\">last component value</text>\n";
        s += "<text x=\"" + num(ox + 12) + "\" y=\"" + num((y0 + y1) / 2) +
             "\" text-anchor=\"middle\" transform=\"rotate(-90 " + num(ox + 12) + " " +
             num((y0 + y1) / 2) + ")\">SHAP value</text>\n";
    }
    s += "</g>\n</svg>\n";
    return s;
}

} // namespace cshap::report
