// Command-line front end: ingest, synth, decompose, train, explain, global, validate.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cshap/error.hpp"
#include "cshap/pipeline.hpp"
#include "cshap/synthetic.hpp"
#include "cshap/validation.hpp"

namespace fs = std::filesystem;
using cshap::pipeline::RunConfig;

namespace {

// Flags are parsed into optionals so that only explicitly given ones
// override values from --config.
struct Overrides {
    std::string config_path;
    std::optional<std::string> input, value_column, timestamp_column, model, out_dir, units,
        model_file;
    std::optional<std::size_t> window_length, stride, background_n, seasonal_period;
    std::optional<double> split;
    std::optional<std::uint64_t> seed;
    bool gap_fill = false;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "JSON run configuration");
        app->add_option("--input", input, "input CSV");
        app->add_option("--value-column", value_column);
        app->add_option("--timestamp-column", timestamp_column);
        app->add_option("--window-length", window_length, "samples per window incl. target");
        app->add_option("--stride", stride);
        app->add_option("--split", split, "training fraction");
        app->add_option("--background-n", background_n);
        app->add_option("--seed", seed);
        app->add_option("--model", model, "persistence | seasonal-naive | ridge | external:<cmd>");
        app->add_option("--seasonal-period", seasonal_period);
        app->add_option("--model-file", model_file, "trained ridge model (model.json)");
        app->add_option("--out-dir", out_dir);
        app->add_option("--units", units, "scaled | domain");
        app->add_flag("--gap-fill", gap_fill, "fill single missing samples");
    }

    RunConfig resolve() const {
        RunConfig c;
        if (!config_path.empty()) c = cshap::pipeline::load_config(config_path);
        if (input) c.input = *input;
        if (value_column) c.value_column = *value_column;
        if (timestamp_column) c.timestamp_column = *timestamp_column;
        if (window_length) c.window_length = *window_length;
        if (stride) c.stride = *stride;
        if (split) c.split = *split;
        if (background_n) c.background_n = *background_n;
        if (seed) c.seed = *seed;
        if (model) c.model = *model;
        if (seasonal_period) c.seasonal_period = *seasonal_period;
        if (model_file) c.model_file = *model_file;
        if (out_dir) c.out_dir = *out_dir;
        if (units) c.units = *units;
        if (gap_fill) c.gap_fill = true;
        c.validate();
        return c;
    }
};

void print_written(const std::vector<fs::path>& paths) {
    for (const auto& p : paths) std::cout << p.string() << "\n";
}

int report_error(const std::string& code, const std::string& message) {
    nlohmann::json err = {{"error", {{"code", code}, {"message", message}}}};
    std::cerr << err.dump() << "\n";
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Concept-level Shapley explanations for time-series forecasters"};
    app.require_subcommand(1);

    Overrides ov;
    std::size_t window = 0;
    std::string set_name = "test";

    auto* ingest = app.add_subcommand("ingest", "parse and validate a CSV, write a canonical copy");
    auto* decompose = app.add_subcommand("decompose", "decompose one window into concepts");
    auto* train = app.add_subcommand("train", "fit the ridge lag model and save it");
    auto* explain = app.add_subcommand("explain", "explain one window");
    auto* global = app.add_subcommand("global", "explain every test window and aggregate");
    for (auto* sub : {ingest, decompose, train, explain, global}) ov.attach(sub);
    for (auto* sub : {decompose, explain}) {
        sub->add_option("--window", window, "window index within the set");
        sub->add_option("--set", set_name, "train | test")->check(CLI::IsMember({"train", "test"}));
    }

    auto* synth = app.add_subcommand("synth", "write a synthetic hourly series as CSV");
    std::size_t synth_length = 3400;
    std::uint64_t synth_seed = 0;
    double synth_noise = 0.5;
    std::string synth_out = "synthetic.csv";
    synth->add_option("--length", synth_length);
    synth->add_option("--seed", synth_seed);
    synth->add_option("--noise", synth_noise, "noise standard deviation");
    synth->add_option("--output,-o", synth_out);

    auto* validate = app.add_subcommand("validate", "run the built-in validation checks");
    std::string scratch = (fs::temp_directory_path() / "cshap-validate").string();
    std::string pjmw;
    validate->add_option("--scratch", scratch, "directory for temporary run outputs");
    validate->add_option("--pjmw", pjmw, "PJMW hourly CSV for the windowing check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return report_error("UsageError", e.what());
    }

    try {
        if (ingest->parsed()) print_written(cshap::pipeline::write_ingest(ov.resolve()));
        else if (decompose->parsed())
            print_written(cshap::pipeline::write_decompose(ov.resolve(), window, set_name));
        else if (train->parsed()) print_written(cshap::pipeline::write_train(ov.resolve()));
        else if (explain->parsed())
            print_written(cshap::pipeline::write_explain(ov.resolve(), window, set_name));
        else if (global->parsed()) print_written(cshap::pipeline::write_global(ov.resolve()));
        else if (synth->parsed()) {
            const auto gen = cshap::synth::generate(
                cshap::validation::hourly_fixture(synth_length, synth_seed, synth_noise));
            std::ofstream out(synth_out, std::ios::binary);
            if (!out) throw cshap::Error(cshap::ErrorCode::IoError, "cannot write " + synth_out);
            cshap::series::write_csv(out, gen.series);
            // Ground truth next to the series: one column per planted component.
            auto truth_path = fs::path(synth_out);
            truth_path.replace_extension(".components.csv");
            std::string csv = "Datetime";
            for (const auto& [name, values] : gen.components) csv += "," + name;
            csv += "\n";
            char buf[40];
            for (std::size_t i = 0; i < gen.series.size(); ++i) {
                csv += cshap::series::format_timestamp(gen.series.timestamp(i));
                for (const auto& [name, values] : gen.components) {
                    std::snprintf(buf, sizeof buf, ",%.17g", values[i]);
                    csv += buf;
                }
                csv += "\n";
            }
            cshap::pipeline::write_file(truth_path, csv);
            std::cout << synth_out << "\n" << truth_path.string() << "\n";
        } else if (validate->parsed()) {
            std::optional<fs::path> csv;
            if (!pjmw.empty()) csv = pjmw;
            else if (const char* env = std::getenv("CSHAP_PJMW_CSV")) csv = env;
            bool ok = true;
            for (const auto& r : cshap::validation::run_all(scratch, csv)) {
                std::cout << cshap::validation::format(r) << "\n";
                ok = ok && r.status != cshap::validation::Status::Fail;
            }
            return ok ? 0 : 1;
        }
    } catch (const cshap::Error& e) {
        return report_error(std::string(cshap::to_string(e.code())), e.what());
    } catch (const std::exception& e) {
        return report_error("InternalError", e.what());
    }
    return 0;
}
