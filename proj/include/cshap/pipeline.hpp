#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cshap/decomposer.hpp"
#include "cshap/execution.hpp"
#include "cshap/models.hpp"
#include "cshap/report.hpp"
#include "cshap/series.hpp"
#include "cshap/shap.hpp"

namespace cshap::pipeline {

inline constexpr int kConfigVersion = 1;

// Effective run configuration. Defaults reproduce the hourly energy setup:
// 169-sample windows (168 inputs + 1 target) at stride 25, 80/20 split,
// 100 background windows, Growth/Daily/Weekly/Other concepts.
struct RunConfig {
    int config_version = kConfigVersion;
    std::string input;
    std::string value_column = "value";
    std::string timestamp_column = "Datetime";
    bool gap_fill = false;
    std::size_t window_length = 169;
    std::size_t stride = 25;
    double split = 0.8;
    std::size_t background_n = 100;
    std::uint64_t seed = 0;
    std::string model = "ridge"; // persistence | seasonal-naive | ridge | external:<cmd>
    std::size_t seasonal_period = 24;
    double ridge_penalty = 1.0;
    std::vector<std::size_t> lags = models::default_lags();
    std::string model_file; // trained ridge model to load instead of training
    long external_timeout_ms = 60000;
    std::string units = "domain"; // units of CSV and SVG outputs: scaled | domain
    decomp::DecompositionSpec decomposition = decomp::DecompositionSpec::hourly_defaults();
    std::string out_dir = "out";

    void validate() const;
    std::size_t input_length() const { return window_length - 1; }
};

nlohmann::json to_json(const RunConfig& config);
// Missing keys keep their defaults; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& doc, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

std::string sha256_hex(std::string_view bytes);
// Digest of the semantic configuration (paths and output location excluded).
std::string config_digest(const RunConfig& config);
std::string dataset_digest(const series::TimeSeries& series);

struct Dataset {
    series::TimeSeries series;
    series::TimeSeries train;
    series::TimeSeries test;
    std::vector<series::Window> train_windows; // domain units
    std::vector<series::Window> test_windows;
    series::Scaler scaler;
    std::vector<series::Window> train_scaled;
    std::vector<series::Window> test_scaled;
    std::string digest;
};

Dataset prepare(const RunConfig& config, series::TimeSeries series);
Dataset load_dataset(const RunConfig& config);

nlohmann::json to_json(const models::RidgeLagModel& model);
models::RidgeLagModel ridge_from_json(const nlohmann::json& doc);

models::RidgeLagModel train_model(const RunConfig& config, const Dataset& data);
models::ModelHandle build_model(const RunConfig& config, const Dataset& data);

struct ExplainedWindow {
    std::size_t index;
    const series::Window* window; // domain units, owned by the Dataset
    decomp::Decomposition decomposition;
    shap::ShapExplanation explanation;
};

// Shared state for one run: decomposer, model, and the seeded background set.
class Explainer {
public:
    Explainer(const RunConfig& config, const Dataset& data, models::ModelHandle model,
              Execution exec = Execution::Parallel);

    const decomp::Decomposer& decomposer() const noexcept { return decomposer_; }
    const shap::BackgroundSet& background() const noexcept { return background_; }
    const models::ModelHandle& model() const noexcept { return model_; }

    ExplainedWindow explain(std::size_t test_index) const;
    ExplainedWindow explain(const std::vector<series::Window>& scaled,
                            const std::vector<series::Window>& raw, std::size_t index,
                            const std::string& set_name) const;
    // Results are ordered by window index regardless of scheduling.
    std::vector<ExplainedWindow> explain_all() const;

private:
    const RunConfig& config_;
    const Dataset& data_;
    models::ModelHandle model_;
    Execution exec_;
    decomp::Decomposer decomposer_;
    shap::BackgroundSet background_;
};

nlohmann::json run_metadata(const RunConfig& config, const Dataset& data,
                            const shap::BackgroundSet& background);
nlohmann::json explanation_record(const ExplainedWindow& w, const series::Scaler& scaler);

struct GlobalResult {
    std::vector<ExplainedWindow> windows;
    report::GlobalReport global_scaled;
    report::GlobalReport global_domain;
    report::CorrelationReport correlation_scaled;
    report::CorrelationReport correlation_domain;
};

GlobalResult run_global(const RunConfig& config, const Dataset& data, const Explainer& explainer);

// Subcommand bodies; each writes its artifacts under config.out_dir and
// returns the list of written paths.
std::vector<std::filesystem::path> write_global(const RunConfig& config);
std::vector<std::filesystem::path> write_explain(const RunConfig& config, std::size_t window,
                                                 const std::string& set_name);
std::vector<std::filesystem::path> write_decompose(const RunConfig& config, std::size_t window,
                                                   const std::string& set_name);
std::vector<std::filesystem::path> write_train(const RunConfig& config);
std::vector<std::filesystem::path> write_ingest(const RunConfig& config);

void write_file(const std::filesystem::path& path, std::string_view contents);

} // namespace cshap::pipeline
