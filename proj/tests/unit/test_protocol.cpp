#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <limits>

#include "cshap/error.hpp"
#include "cshap/protocol.hpp"
#include "cshap/random.hpp"

using namespace cshap;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no cshap::Error thrown");
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST_CASE("hello, predict and bye encodings") {
    CHECK(protocol::encode_hello(168) == R"({"type":"hello","protocol":1,"input_length":168})");
    CHECK(protocol::encode_bye() == R"({"type":"bye"})");
    models::WindowBatch b(2);
    b.push_back(std::vector<double>{0.5, -2.0});
    b.push_back(std::vector<double>{0.1, 3.0});
    CHECK(protocol::encode_predict(7, b) ==
          R"({"type":"predict","id":7,"windows":[[0.5,-2],[0.10000000000000001,3]]})");
}

TEST_CASE("number formatting round-trips every double") {
    random::Engine rng(99);
    for (int i = 0; i < 10000; ++i) {
        const double x = std::ldexp(random::standard_normal(rng), static_cast<int>(random::uniform_index(rng, 200)) - 100);
        REQUIRE(std::strtod(protocol::format_number(x).c_str(), nullptr) == x);
    }
    CHECK(std::strtod(protocol::format_number(std::numeric_limits<double>::denorm_min()).c_str(), nullptr) ==
          std::numeric_limits<double>::denorm_min());
}

TEST_CASE("ready handshake") {
    protocol::decode_ready(R"({"type":"ready"})");
    protocol::decode_ready(R"({"type":"ready","name":"adapter"})");
    CHECK(code_of([] { protocol::decode_ready(R"({"type":"prediction"})"); }) == ErrorCode::ProtocolViolation);
    CHECK(code_of([] { protocol::decode_ready("not json"); }) == ErrorCode::ProtocolViolation);
}

TEST_CASE("prediction decoding") {
    CHECK(protocol::decode_prediction(R"({"type":"prediction","id":3,"predictions":[1.5,-2]})", 3, 2) ==
          std::vector<double>{1.5, -2.0});
    CHECK(code_of([] { protocol::decode_prediction(R"({"type":"prediction","id":4,"predictions":[1]})", 3, 1); }) ==
          ErrorCode::ProtocolViolation);
    CHECK(code_of([] { protocol::decode_prediction(R"({"type":"prediction","id":3,"predictions":[1]})", 3, 2); }) ==
          ErrorCode::ProtocolViolation);
    CHECK(code_of([] { protocol::decode_prediction(R"({"type":"prediction","id":3,"predictions":["1"]})", 3, 1); }) ==
          ErrorCode::ProtocolViolation);
    CHECK(code_of([] { protocol::decode_prediction(R"({"type":"prediction","id":3})", 3, 1); }) ==
          ErrorCode::ProtocolViolation);
    CHECK(code_of([] { protocol::decode_prediction("{", 3, 1); }) == ErrorCode::ProtocolViolation);
    for (const char* bad : {R"({"type":"prediction","id":3,"predictions":[NaN]})",
                            R"({"type":"prediction","id":3,"predictions":[-Infinity]})",
                            R"({"type":"prediction","id":3,"predictions":[null]})"}) {
        CHECK(code_of([&] { protocol::decode_prediction(bad, 3, 1); }) == ErrorCode::ModelFailure);
    }
}
