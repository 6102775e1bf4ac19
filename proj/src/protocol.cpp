#include "cshap/protocol.hpp"

#include <cmath>
#include <cstdio>
#include <regex>

#include <json.hpp>

#include "cshap/error.hpp"

namespace cshap::protocol {

namespace {

[[noreturn]] void violation(std::string_view what, std::string_view line) {
    throw Error(ErrorCode::ProtocolViolation,
                std::string(what) + ": '" + std::string(line) + "'");
}

nlohmann::json parse_line(std::string_view line) {
    auto doc = nlohmann::json::parse(line.begin(), line.end(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) violation("reply is not a JSON object", line);
    return doc;
}

bool has_non_finite_token(std::string_view line) {
    static const std::regex token(R"((^|[\[,:\s])-?(NaN|nan|Infinity|inf)\s*([\],}]|$))");
    return std::regex_search(line.begin(), line.end(), token);
}

} // namespace

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string encode_hello(std::size_t input_length) {
    return R"({"type":"hello","protocol":)" + std::to_string(kVersion) +
           R"(,"input_length":)" + std::to_string(input_length) + "}";
}

std::string encode_predict(std::uint64_t id, const models::WindowBatch& batch) {
    std::string out = R"({"type":"predict","id":)" + std::to_string(id) + R"(,"windows":[)";
    out.reserve(out.size() + batch.size() * (batch.length() * 24 + 3));
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (i) out += ',';
        out += '[';
        const auto row = batch.row(i);
        for (std::size_t t = 0; t < row.size(); ++t) {
            if (t) out += ',';
            out += format_number(row[t]);
        }
        out += ']';
    }
    out += "]}";
    return out;
}

std::string encode_bye() { return R"({"type":"bye"})"; }

void decode_ready(std::string_view line) {
    const auto doc = parse_line(line);
    if (doc.value("type", "") != "ready") violation("expected ready", line);
}

std::vector<double> decode_prediction(std::string_view line, std::uint64_t expected_id,
                                      std::size_t expected_count) {
    auto doc = nlohmann::json::parse(line.begin(), line.end(), nullptr, false);
    if (doc.is_discarded()) {
        if (has_non_finite_token(line)) {
            throw Error(ErrorCode::ModelFailure, "external model returned a non-finite prediction: '" +
                                                     std::string(line) + "'");
        }
        violation("reply is not valid JSON", line);
    }
    if (!doc.is_object()) violation("reply is not a JSON object", line);
    if (doc.value("type", "") != "prediction") violation("expected prediction", line);
    const auto id = doc.find("id");
    if (id == doc.end() || !id->is_number_unsigned() || id->get<std::uint64_t>() != expected_id) {
        violation("prediction id does not match request " + std::to_string(expected_id), line);
    }
    const auto preds = doc.find("predictions");
    if (preds == doc.end() || !preds->is_array()) violation("missing predictions array", line);
    if (preds->size() != expected_count) {
        violation("expected " + std::to_string(expected_count) + " predictions", line);
    }
    std::vector<double> out;
    out.reserve(preds->size());
    for (const auto& p : *preds) {
        if (p.is_null()) {
            throw Error(ErrorCode::ModelFailure, "external model returned a non-finite prediction");
        }
        if (!p.is_number()) violation("prediction is not a number", line);
        const double v = p.get<double>();
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::ModelFailure, "external model returned a non-finite prediction");
        }
        out.push_back(v);
    }
    return out;
}

} // namespace cshap::protocol
