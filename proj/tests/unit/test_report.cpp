#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <regex>

#include "cshap/error.hpp"
#include "cshap/random.hpp"
#include "cshap/report.hpp"

using namespace cshap;
using namespace cshap::report;

namespace {

shap::ShapExplanation expl(std::vector<std::string> names, std::vector<double> phi, double base = 0.0) {
    shap::ShapExplanation e;
    e.concepts = std::move(names);
    e.phi = std::move(phi);
    e.base_value = base;
    e.model_output = base;
    for (double p : e.phi) e.model_output += p;
    return e;
}

std::vector<double> bar_widths(const std::string& svg) {
    std::vector<double> out;
    const std::regex bar(R"re(<rect class="bar"[^>]* width="([0-9.]+)")re");
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), bar); it != std::sregex_iterator(); ++it) {
        out.push_back(std::stod((*it)[1]));
    }
    return out;
}

std::size_t count_matches(const std::string& text, const std::string& pattern) {
    const std::regex re(pattern);
    return static_cast<std::size_t>(std::distance(std::sregex_iterator(text.begin(), text.end(), re),
                                                  std::sregex_iterator()));
}

} // namespace

TEST_CASE("global means of absolute phi") {
    const std::vector<shap::ShapExplanation> e{expl({"A", "B"}, {1, -1}), expl({"A", "B"}, {3, 1})};
    const auto g = global_report(e);
    CHECK(g.concepts == std::vector<std::string>{"A", "B"});
    CHECK(g.mean_abs_phi == std::vector<double>{2, 1});
    CHECK(g.count == 2);
    const std::vector<shap::ShapExplanation> reversed{e[1], e[0]};
    CHECK(global_report(reversed).mean_abs_phi == g.mean_abs_phi);
    CHECK(global_report(std::vector{expl({"A"}, {-4})}).mean_abs_phi == std::vector<double>{4});
    CHECK(global_report(std::vector{expl({"A", "B"}, {0, 0})}).mean_abs_phi == std::vector<double>{0, 0});
    CHECK(global_report(e, 2.0, "abc").mean_abs_phi == std::vector<double>{4, 2});
    CHECK(global_report(e, 2.0, "abc").config_digest == "abc");
    CHECK_THROWS_AS(global_report(std::vector<shap::ShapExplanation>{}), Error);
}

TEST_CASE("waterfall converts to domain units") {
    const auto e = expl({"G", "D", "W", "O"}, {1, 0, 0, 0});
    const auto w = waterfall(e, series::Scaler(10.0, 2.0));
    CHECK(w.base_value == 10.0);
    CHECK(w.steps[0].concept_name == "G");
    CHECK(w.steps[0].contribution == 2.0);
    CHECK(w.final_value == 12.0);
    const auto zero = waterfall(expl({"G", "D"}, {0, 0}, 0.3));
    CHECK(zero.final_value == zero.base_value);
}

TEST_CASE("waterfall additivity reproduces the unscaled model output") {
    random::Engine rng(3);
    for (int k = 0; k < 50; ++k) {
        const series::Scaler sc(5000.0 + 500.0 * random::standard_normal(rng), 100.0 + 900.0 * random::uniform_unit(rng));
        std::vector<double> phi(4);
        for (auto& p : phi) p = random::standard_normal(rng);
        const auto e = expl({"G", "D", "W", "O"}, phi, random::standard_normal(rng));
        const auto w = waterfall(e, sc);
        double total = w.base_value;
        for (const auto& s : w.steps) total += s.contribution;
        CHECK(std::abs(total - sc.inverse(e.model_output)) <= 1e-6);
        CHECK(std::abs(w.final_value - sc.inverse(e.model_output)) <= 1e-6);
        const auto scaled = waterfall(e);
        double t2 = scaled.base_value;
        for (const auto& s : scaled.steps) t2 += s.contribution;
        CHECK(std::abs(t2 - e.model_output) <= 1e-9);
    }
}

TEST_CASE("pearson correlation") {
    const std::vector<double> x{1, 2, 3, 4};
    CHECK(*pearson(x, std::vector<double>{-1, -2, -3, -4}) == -1.0);
    CHECK(*pearson(x, std::vector<double>{3, 5, 7, 9}) == 1.0);
    CHECK_FALSE(pearson(x, std::vector<double>{2, 2, 2, 2}));
    CHECK(*pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 3, 2}) == Catch::Approx(0.5));
}

TEST_CASE("correlation report pairs last values with phi") {
    std::vector<shap::ShapExplanation> e;
    std::vector<decomp::Decomposition> d;
    for (int k = 0; k < 5; ++k) {
        const double x = static_cast<double>(k);
        d.emplace_back(std::vector<std::string>{"Growth", "Flat"},
                       std::vector<std::vector<double>>{{0.0, x}, {1.0, 1.0}}, std::vector<double>{1.0, x + 1.0});
        e.push_back(expl({"Growth", "Flat"}, {2.0 * x - 1.0, 0.5 * x}));
    }
    const auto r = correlation_report(e, d);
    REQUIRE(r.concepts.size() == 2);
    CHECK(r.concepts[0].last_values.size() == 5);
    CHECK(*r.concepts[0].pearson_r == Catch::Approx(1.0).margin(1e-12));
    CHECK_FALSE(r.concepts[1].pearson_r);
    const auto dom = correlation_report(e, d, series::Scaler(100.0, 10.0));
    CHECK(dom.concepts[0].last_values[2] == 2.0 * 10.0 + 100.0);
    CHECK(dom.concepts[1].last_values[2] == 10.0);
    CHECK(dom.concepts[0].phi[2] == 30.0);
}

TEST_CASE("SVG rendering") {
    GlobalReport g;
    g.concepts = {"A", "B"};
    g.mean_abs_phi = {2.0, 1.0};
    g.count = 2;
    const auto svg = render_svg(g, {"Global", "MW"});
    const auto widths = bar_widths(svg);
    REQUIRE(widths.size() == 2);
    CHECK(widths[0] == Catch::Approx(2.0 * widths[1]).margin(0.02));
    CHECK(svg == render_svg(g, {"Global", "MW"}));
    CHECK(svg.find("<title>") != std::string::npos);
    CHECK(svg.find("<svg") != std::string::npos);
    const auto untitled = render_svg(g, {"", ""});
    CHECK(untitled.find("<title") == std::string::npos);

    const auto w = waterfall(expl({"G", "D", "W"}, {1.0, -0.5, 0.25}, 3.0));
    const auto ws = render_svg(w, {"w", ""});
    CHECK(ws == render_svg(w, {"w", ""}));
    CHECK(count_matches(ws, "class=\"arrow\"") == 3);

    std::vector<shap::ShapExplanation> e;
    std::vector<decomp::Decomposition> d;
    for (int k = 0; k < 4; ++k) {
        d.emplace_back(std::vector<std::string>{"A"}, std::vector<std::vector<double>>{{double(k)}},
                       std::vector<double>{double(k)});
        e.push_back(expl({"A"}, {double(k)}));
    }
    const auto cs = render_svg(correlation_report(e, d));
    CHECK(count_matches(cs, "<circle") == 4);
    CHECK(cs.find("<title") == std::string::npos);
}

TEST_CASE("SVG escapes markup in labels") {
    GlobalReport g;
    g.concepts = {"a<b&c"};
    g.mean_abs_phi = {1.0};
    g.count = 1;
    const auto svg = render_svg(g, {"x > y", ""});
    CHECK(svg.find("a<b") == std::string::npos);
    CHECK(svg.find("a&lt;b&amp;c") != std::string::npos);
}
