#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cshap/models.hpp"

// Wire format for external models: one UTF-8 JSON object per line.
//   parent -> {"type":"hello","protocol":1,"input_length":168}
//   child  -> {"type":"ready"}
//   parent -> {"type":"predict","id":<uint>,"windows":[[f64,...],...]}
//   child  -> {"type":"prediction","id":<same>,"predictions":[f64,...]}
//   parent -> {"type":"bye"}          (child exits 0)
namespace cshap::protocol {

inline constexpr int kVersion = 1;

// printf %.17g: lossless for every finite double.
std::string format_number(double value);

std::string encode_hello(std::size_t input_length);
std::string encode_predict(std::uint64_t id, const models::WindowBatch& batch);
std::string encode_bye();

// Throws Error{ProtocolViolation} echoing `line` when it is not {"type":"ready"}.
void decode_ready(std::string_view line);

// Throws ProtocolViolation on malformed replies or id/count mismatch, and
// ModelFailure on non-finite predictions.
std::vector<double> decode_prediction(std::string_view line, std::uint64_t expected_id,
                                      std::size_t expected_count);

} // namespace cshap::protocol
