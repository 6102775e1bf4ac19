#include "cshap/pipeline.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cshap/error.hpp"

namespace cshap::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

void RunConfig::validate() const {
    const auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigError, what); };
    if (config_version != kConfigVersion) {
        fail("unsupported config_version " + std::to_string(config_version));
    }
    if (window_length < 3) fail("window_length must be at least 3");
    if (stride == 0) fail("stride must be at least 1");
    if (!(split > 0.0 && split < 1.0)) fail("split must lie in (0, 1)");
    if (background_n == 0) fail("background_n must be at least 1");
    if (units != "scaled" && units != "domain") fail("units must be 'scaled' or 'domain'");
    if (model != "ridge" && model != "persistence" && model != "seasonal-naive" &&
        !model.starts_with("external:")) {
        fail("unknown model '" + model + "'");
    }
    if (model.starts_with("external:") && model.size() == 9) fail("external model needs a command");
    if (external_timeout_ms <= 0) fail("external_timeout_ms must be positive");
    decomposition.validate();
}

json to_json(const RunConfig& c) {
    json periods = json::array();
    for (const auto& p : c.decomposition.periods) {
        periods.push_back({{"name", p.name}, {"period", p.period}, {"harmonics", p.harmonics}});
    }
    return json{
        {"config_version", c.config_version},
        {"input", c.input},
        {"value_column", c.value_column},
        {"timestamp_column", c.timestamp_column},
        {"gap_fill", c.gap_fill},
        {"window_length", c.window_length},
        {"stride", c.stride},
        {"split", c.split},
        {"background_n", c.background_n},
        {"seed", c.seed},
        {"model", c.model},
        {"seasonal_period", c.seasonal_period},
        {"ridge_penalty", c.ridge_penalty},
        {"lags", c.lags},
        {"model_file", c.model_file},
        {"external_timeout_ms", c.external_timeout_ms},
        {"units", c.units},
        {"decomposition",
         {{"periods", periods},
          {"n_changepoints", c.decomposition.n_changepoints},
          {"changepoint_span", c.decomposition.changepoint_span},
          {"ridge_trend", c.decomposition.ridge_trend},
          {"ridge_seasonal", c.decomposition.ridge_seasonal}}},
        {"out_dir", c.out_dir},
    };
}

namespace {

template <typename T>
void read_key(const json& doc, const char* key, T& out) {
    if (auto it = doc.find(key); it != doc.end()) {
        try {
            out = it->get<T>();
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ConfigError, std::string("config key '") + key + "': " + e.what());
        }
    }
}

void reject_unknown(const json& doc, std::initializer_list<std::string_view> known,
                    const std::string& where) {
    for (const auto& [key, value] : doc.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw Error(ErrorCode::ConfigError, "unknown config key '" + where + key + "'");
        }
    }
}

} // namespace

RunConfig config_from_json(const json& doc, RunConfig c) {
    if (!doc.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");
    reject_unknown(doc,
                   {"config_version", "input", "value_column", "timestamp_column", "gap_fill",
                    "window_length", "stride", "split", "background_n", "seed", "model",
                    "seasonal_period", "ridge_penalty", "lags", "model_file",
                    "external_timeout_ms", "units", "decomposition", "out_dir"},
                   "");
    if (!doc.contains("config_version")) {
        throw Error(ErrorCode::ConfigError, "config file lacks 'config_version'");
    }
    read_key(doc, "config_version", c.config_version);
    read_key(doc, "input", c.input);
    read_key(doc, "value_column", c.value_column);
    read_key(doc, "timestamp_column", c.timestamp_column);
    read_key(doc, "gap_fill", c.gap_fill);
    read_key(doc, "window_length", c.window_length);
    read_key(doc, "stride", c.stride);
    read_key(doc, "split", c.split);
    read_key(doc, "background_n", c.background_n);
    read_key(doc, "seed", c.seed);
    read_key(doc, "model", c.model);
    read_key(doc, "seasonal_period", c.seasonal_period);
    read_key(doc, "ridge_penalty", c.ridge_penalty);
    read_key(doc, "lags", c.lags);
    read_key(doc, "model_file", c.model_file);
    read_key(doc, "external_timeout_ms", c.external_timeout_ms);
    read_key(doc, "units", c.units);
    read_key(doc, "out_dir", c.out_dir);
    if (auto it = doc.find("decomposition"); it != doc.end()) {
        const auto& d = *it;
        if (!d.is_object()) throw Error(ErrorCode::ConfigError, "'decomposition' must be an object");
        reject_unknown(d, {"periods", "n_changepoints", "changepoint_span", "ridge_trend",
                           "ridge_seasonal"},
                       "decomposition.");
        read_key(d, "n_changepoints", c.decomposition.n_changepoints);
        read_key(d, "changepoint_span", c.decomposition.changepoint_span);
        read_key(d, "ridge_trend", c.decomposition.ridge_trend);
        read_key(d, "ridge_seasonal", c.decomposition.ridge_seasonal);
        if (auto p = d.find("periods"); p != d.end()) {
            if (!p->is_array()) throw Error(ErrorCode::ConfigError, "'periods' must be an array");
            c.decomposition.periods.clear();
            for (const auto& entry : *p) {
                decomp::SeasonalPeriod sp;
                read_key(entry, "name", sp.name);
                read_key(entry, "period", sp.period);
                read_key(entry, "harmonics", sp.harmonics);
                c.decomposition.periods.push_back(std::move(sp));
            }
        }
    }
    return c;
}

RunConfig load_config(const fs::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorCode::ConfigError, path.string() + " is not valid JSON");
    return config_from_json(doc, std::move(base));
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::IoError, "SHA-256 computation failed");
    }
    std::string out;
    char hex[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(hex, sizeof hex, "%02x", digest[i]);
        out += hex;
    }
    return out;
}

std::string config_digest(const RunConfig& config) {
    auto doc = to_json(config);
    doc.erase("input");
    doc.erase("out_dir");
    doc.erase("model_file");
    return sha256_hex(doc.dump());
}

std::string dataset_digest(const series::TimeSeries& s) {
    std::ostringstream text;
    series::write_csv(text, s);
    return sha256_hex(text.str());
}

// ---------------------------------------------------------------------------
// Data preparation

Dataset prepare(const RunConfig& config, series::TimeSeries series) {
    config.validate();
    auto [train, test] = series::split(series, {config.split});
    auto train_windows = series::make_windows(train, config.window_length, config.stride);
    auto test_windows = series::make_windows(test, config.window_length, config.stride);
    const auto scaler = series::fit_scaler(train_windows);
    std::vector<series::Window> train_scaled, test_scaled;
    for (const auto& w : train_windows) train_scaled.push_back(scaler.transform(w));
    for (const auto& w : test_windows) test_scaled.push_back(scaler.transform(w));
    auto digest = dataset_digest(series);
    return Dataset{std::move(series),       std::move(train),        std::move(test),
                   std::move(train_windows), std::move(test_windows), scaler,
                   std::move(train_scaled),  std::move(test_scaled),  std::move(digest)};
}

Dataset load_dataset(const RunConfig& config) {
    if (config.input.empty()) throw Error(ErrorCode::ConfigError, "no input CSV given");
    series::CsvOptions options{config.value_column, config.timestamp_column, config.gap_fill};
    return prepare(config, series::load_csv(config.input, options));
}

// ---------------------------------------------------------------------------
// Models

json to_json(const models::RidgeLagModel& m) {
    return json{{"kind", "ridge"},
                {"input_length", m.input_length},
                {"lags", m.lags},
                {"coefficients", m.coefficients},
                {"intercept", m.intercept},
                {"ridge", m.ridge}};
}

models::RidgeLagModel ridge_from_json(const json& doc) {
    try {
        if (doc.at("kind").get<std::string>() != "ridge") {
            throw Error(ErrorCode::ConfigError, "model file does not hold a ridge model");
        }
        models::RidgeLagModel m;
        m.input_length = doc.at("input_length").get<std::size_t>();
        m.lags = doc.at("lags").get<std::vector<std::size_t>>();
        m.coefficients = doc.at("coefficients").get<std::vector<double>>();
        m.intercept = doc.at("intercept").get<double>();
        m.ridge = doc.at("ridge").get<double>();
        if (m.lags.size() != m.coefficients.size()) {
            throw Error(ErrorCode::ConfigError, "model file: one coefficient per lag required");
        }
        return m;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("malformed model file: ") + e.what());
    }
}

models::RidgeLagModel train_model(const RunConfig& config, const Dataset& data) {
    return models::train_ridge(data.train_scaled, config.lags, config.ridge_penalty);
}

models::ModelHandle build_model(const RunConfig& config, const Dataset& data) {
    if (config.model == "persistence") return models::persistence();
    if (config.model == "seasonal-naive") {
        return models::seasonal_naive(config.seasonal_period, config.input_length());
    }
    if (config.model.starts_with("external:")) {
        return models::external_model({config.model.substr(9), config.input_length(),
                                       std::chrono::milliseconds(config.external_timeout_ms)});
    }
    if (!config.model_file.empty()) {
        std::ifstream in(config.model_file);
        if (!in) throw Error(ErrorCode::IoError, "cannot open model file " + config.model_file);
        const auto doc = json::parse(in, nullptr, false);
        if (doc.is_discarded()) throw Error(ErrorCode::ConfigError, "model file is not valid JSON");
        auto model = ridge_from_json(doc);
        // Coefficients live in scaled units, so the file must match this dataset's scaler.
        if (auto sc = doc.find("scaler"); sc != doc.end() &&
            (sc->value("mean", 0.0) != data.scaler.mean() || sc->value("std", 0.0) != data.scaler.std())) {
            throw Error(ErrorCode::ConfigError, "model file was trained under a different scaler");
        }
        if (model.input_length != config.input_length()) {
            throw Error(ErrorCode::LengthMismatch, "model file input length differs from config");
        }
        return model.handle();
    }
    return train_model(config, data).handle();
}

// ---------------------------------------------------------------------------
// Explanation

namespace {

std::vector<std::vector<double>> inputs_of(const std::vector<series::Window>& windows) {
    std::vector<std::vector<double>> out;
    out.reserve(windows.size());
    for (const auto& w : windows) out.push_back(w.input);
    return out;
}

} // namespace

Explainer::Explainer(const RunConfig& config, const Dataset& data, models::ModelHandle model,
                     Execution exec)
    : config_(config),
      data_(data),
      model_(std::move(model)),
      exec_(exec),
      decomposer_(config.input_length(), config.decomposition),
      background_([&] {
          const auto pool = inputs_of(data.train_scaled);
          return shap::sample_background(pool, config.background_n, config.seed, decomposer_, exec);
      }()) {}

ExplainedWindow Explainer::explain(const std::vector<series::Window>& scaled,
                                   const std::vector<series::Window>& raw, std::size_t index,
                                   const std::string& set_name) const {
    if (index >= scaled.size()) {
        throw Error(ErrorCode::InvalidArgument, set_name + " window " + std::to_string(index) +
                                                    " out of range (" +
                                                    std::to_string(scaled.size()) + " windows)");
    }
    auto d = decomposer_.fit(scaled[index].input);
    const auto inner = model_.thread_safe() ? Execution::Serial : exec_;
    auto id = set_name + ":" + std::to_string(index);
    auto e = shap::compute_shap(d, model_, background_, inner, std::move(id));
    return ExplainedWindow{index, &raw[index], std::move(d), std::move(e)};
}

ExplainedWindow Explainer::explain(std::size_t test_index) const {
    return explain(data_.test_scaled, data_.test_windows, test_index, "test");
}

std::vector<ExplainedWindow> Explainer::explain_all() const {
    const auto n = data_.test_scaled.size();
    std::vector<std::optional<ExplainedWindow>> slots(n);
    if (exec_ == Execution::Parallel && model_.thread_safe()) {
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            try {
                slots[static_cast<std::size_t>(i)].emplace(explain(static_cast<std::size_t>(i)));
            } catch (...) {
#pragma omp critical(cshap_explain_all)
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
    } else {
        for (std::size_t i = 0; i < n; ++i) slots[i].emplace(explain(i));
    }
    std::vector<ExplainedWindow> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

json run_metadata(const RunConfig& config, const Dataset& data,
                  const shap::BackgroundSet& background) {
    return json{{"tool", "cshap"},
                {"format_version", 1},
                {"seed", config.seed},
                {"config_digest", config_digest(config)},
                {"dataset_digest", data.digest},
                {"config", [&] {
                     auto c = to_json(config);
                     c.erase("out_dir");
                     return c;
                 }()},
                {"scaler", {{"mean", data.scaler.mean()}, {"std", data.scaler.std()}}},
                {"series",
                 {{"length", data.series.size()},
                  {"start", series::format_timestamp(data.series.start())},
                  {"step_minutes", data.series.step_minutes()},
                  {"train_windows", data.train_windows.size()},
                  {"test_windows", data.test_windows.size()}}},
                {"background",
                 {{"n", background.size()},
                  {"seed", background.seed()},
                  {"pool_indices", background.pool_indices()}}}};
}

namespace {

json explanation_units(const shap::ShapExplanation& e, double scale, double shift) {
    json phi = json::object();
    for (std::size_t i = 0; i < e.concepts.size(); ++i) phi[e.concepts[i]] = e.phi[i] * scale;
    return json{{"base_value", e.base_value * scale + shift},
                {"model_output", e.model_output * scale + shift},
                {"phi", phi}};
}

json waterfall_json(const report::WaterfallReport& w) {
    json steps = json::array();
    for (const auto& s : w.steps) steps.push_back({{"concept", s.concept_name}, {"contribution", s.contribution}});
    return json{{"base_value", w.base_value}, {"steps", steps}, {"final_value", w.final_value}};
}

json global_json(const report::GlobalReport& g) {
    json means = json::object();
    for (std::size_t i = 0; i < g.concepts.size(); ++i) means[g.concepts[i]] = g.mean_abs_phi[i];
    return json{{"count", g.count}, {"config_digest", g.config_digest}, {"mean_abs_phi", means},
                {"concept_order", g.concepts}};
}

json correlation_json(const report::CorrelationReport& r) {
    json out = json::object();
    for (const auto& c : r.concepts) {
        json pairs = json::array();
        for (std::size_t k = 0; k < c.phi.size(); ++k) pairs.push_back({c.last_values[k], c.phi[k]});
        out[c.concept_name] = {{"pearson_r", c.pearson_r ? json(*c.pearson_r) : json(nullptr)},
                               {"pairs", pairs}};
    }
    return out;
}

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

json explanation_record(const ExplainedWindow& w, const series::Scaler& scaler) {
    return json{
        {"input_id", w.explanation.input_id},
        {"window_index", w.index},
        {"origin_index", w.window->origin_index},
        {"origin_time", series::format_timestamp(w.window->origin_time)},
        {"target", w.window->target ? json(*w.window->target) : json(nullptr)},
        {"scaled", explanation_units(w.explanation, 1.0, 0.0)},
        {"domain", explanation_units(w.explanation, scaler.std(), scaler.mean())},
        {"waterfall_domain", waterfall_json(report::waterfall(w.explanation, scaler))},
        {"efficiency_gap", w.explanation.efficiency_gap()},
    };
}

GlobalResult run_global(const RunConfig& config, const Dataset& data, const Explainer& explainer) {
    GlobalResult r;
    r.windows = explainer.explain_all();
    if (r.windows.empty()) {
        throw Error(ErrorCode::EmptyInput, "test split produced no windows");
    }
    std::vector<shap::ShapExplanation> explanations;
    std::vector<decomp::Decomposition> decompositions;
    for (const auto& w : r.windows) {
        explanations.push_back(w.explanation);
        decompositions.push_back(w.decomposition);
    }
    const auto digest = config_digest(config);
    r.global_scaled = report::global_report(explanations, 1.0, digest);
    r.global_domain = report::global_report(explanations, data.scaler.std(), digest);
    r.correlation_scaled = report::correlation_report(explanations, decompositions);
    r.correlation_domain = report::correlation_report(explanations, decompositions, data.scaler);
    return r;
}

void write_file(const fs::path& path, std::string_view contents) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::vector<fs::path> write_global(const RunConfig& config) {
    const auto data = load_dataset(config);
    const Explainer explainer(config, data, build_model(config, data));
    const auto result = run_global(config, data, explainer);
    const bool domain = config.units == "domain";
    const fs::path out = config.out_dir;

    json windows = json::array();
    for (const auto& w : result.windows) windows.push_back(explanation_record(w, data.scaler));
    json record{{"metadata", run_metadata(config, data, explainer.background())},
                {"model", explainer.model().kind()},
                {"explanations", windows},
                {"global", {{"scaled", global_json(result.global_scaled)},
                            {"domain", global_json(result.global_domain)}}},
                {"correlation", {{"scaled", correlation_json(result.correlation_scaled)},
                                 {"domain", correlation_json(result.correlation_domain)}}}};

    std::string csv = "window,origin_time,concept,phi,last_component_value,base_value,model_output\n";
    const double scale = domain ? data.scaler.std() : 1.0;
    const double shift = domain ? data.scaler.mean() : 0.0;
    for (const auto& w : result.windows) {
        const auto& e = w.explanation;
        for (std::size_t i = 0; i < e.concepts.size(); ++i) {
            const double offset = e.concepts[i] == decomp::kGrowth ? shift : 0.0;
            csv += std::to_string(w.index) + "," + series::format_timestamp(w.window->origin_time) +
                   "," + e.concepts[i] + "," + csv_number(e.phi[i] * scale) + "," +
                   csv_number(w.decomposition.component(i).back() * scale + offset) + "," +
                   csv_number(e.base_value * scale + shift) + "," +
                   csv_number(e.model_output * scale + shift) + "\n";
        }
    }

    const std::string units_label = domain ? "domain units" : "scaled units";
    std::vector<fs::path> written{out / "report.json", out / "explanations.csv",
                                  out / "global.svg", out / "correlation.svg"};
    write_file(written[0], record.dump(2) + "\n");
    write_file(written[1], csv);
    write_file(written[2], report::render_svg(domain ? result.global_domain : result.global_scaled,
                                              {"Mean absolute SHAP value per concept", units_label}));
    write_file(written[3],
               report::render_svg(domain ? result.correlation_domain : result.correlation_scaled,
                                  {"Last component value vs SHAP value", units_label}));
    return written;
}

namespace {

const std::vector<series::Window>& pick(const Dataset& data, const std::string& set_name,
                                        bool scaled) {
    if (set_name == "test") return scaled ? data.test_scaled : data.test_windows;
    if (set_name == "train") return scaled ? data.train_scaled : data.train_windows;
    throw Error(ErrorCode::InvalidArgument, "window set must be 'train' or 'test'");
}

} // namespace

std::vector<fs::path> write_explain(const RunConfig& config, std::size_t window,
                                    const std::string& set_name) {
    const auto data = load_dataset(config);
    const Explainer explainer(config, data, build_model(config, data));
    const auto explained =
        explainer.explain(pick(data, set_name, true), pick(data, set_name, false), window, set_name);
    const bool domain = config.units == "domain";

    json record{{"metadata", run_metadata(config, data, explainer.background())},
                {"model", explainer.model().kind()},
                {"explanation", explanation_record(explained, data.scaler)}};
    const auto stem = "explanation_" + set_name + "_" + std::to_string(window);
    const fs::path out = config.out_dir;
    std::vector<fs::path> written{out / (stem + ".json"),
                                  out / ("waterfall_" + set_name + "_" + std::to_string(window) + ".svg")};
    write_file(written[0], record.dump(2) + "\n");
    const auto wf = domain ? report::waterfall(explained.explanation, data.scaler)
                           : report::waterfall(explained.explanation);
    write_file(written[1],
               report::render_svg(wf, {"Local explanation, " + set_name + " window " +
                                           std::to_string(window) + " (" +
                                           series::format_timestamp(explained.window->origin_time) + ")",
                                       domain ? "domain units" : "scaled units"}));
    return written;
}

std::vector<fs::path> write_decompose(const RunConfig& config, std::size_t window,
                                      const std::string& set_name) {
    const auto data = load_dataset(config);
    const auto& scaled = pick(data, set_name, true);
    const auto& raw = pick(data, set_name, false);
    if (window >= scaled.size()) {
        throw Error(ErrorCode::InvalidArgument, set_name + " window " + std::to_string(window) +
                                                    " out of range");
    }
    const decomp::Decomposer decomposer(config.input_length(), config.decomposition);
    const auto d = decomposer.fit(scaled[window].input);
    const bool domain = config.units == "domain";
    const double scale = domain ? data.scaler.std() : 1.0;
    const double shift = domain ? data.scaler.mean() : 0.0;

    std::string csv = "index,timestamp,original";
    for (const auto& n : d.names()) csv += "," + n;
    csv += "\n";
    for (std::size_t t = 0; t < d.length(); ++t) {
        csv += std::to_string(t) + "," +
               series::format_timestamp(raw[window].origin_time +
                                        static_cast<std::int64_t>(t) * data.series.step_minutes()) +
               "," + csv_number(d.original()[t] * scale + shift);
        for (std::size_t c = 0; c < d.size(); ++c) {
            const double offset = d.names()[c] == decomp::kGrowth ? shift : 0.0;
            csv += "," + csv_number(d.component(c)[t] * scale + offset);
        }
        csv += "\n";
    }
    const fs::path path = fs::path(config.out_dir) /
                          ("decomposition_" + set_name + "_" + std::to_string(window) + ".csv");
    write_file(path, csv);
    return {path};
}

std::vector<fs::path> write_train(const RunConfig& config) {
    if (config.model != "ridge") {
        throw Error(ErrorCode::ConfigError, "only the ridge model is trainable; got '" + config.model + "'");
    }
    const auto data = load_dataset(config);
    auto doc = to_json(train_model(config, data));
    doc["config_digest"] = config_digest(config);
    doc["scaler"] = {{"mean", data.scaler.mean()}, {"std", data.scaler.std()}};
    const fs::path path = fs::path(config.out_dir) / "model.json";
    write_file(path, doc.dump(2) + "\n");
    return {path};
}

std::vector<fs::path> write_ingest(const RunConfig& config) {
    if (config.input.empty()) throw Error(ErrorCode::ConfigError, "no input CSV given");
    const auto s = series::load_csv(config.input, {config.value_column, config.timestamp_column,
                                                   config.gap_fill});
    std::ostringstream csv;
    series::write_csv(csv, s, config.timestamp_column, config.value_column);
    const fs::path out = config.out_dir;
    std::vector<fs::path> written{out / "series.csv", out / "series.json"};
    write_file(written[0], csv.str());
    json summary{{"length", s.size()},
                 {"start", series::format_timestamp(s.start())},
                 {"end", series::format_timestamp(s.timestamp(s.size() - 1))},
                 {"step_minutes", s.step_minutes()},
                 {"dataset_digest", dataset_digest(s)}};
    write_file(written[1], summary.dump(2) + "\n");
    return written;
}

} // namespace cshap::pipeline
