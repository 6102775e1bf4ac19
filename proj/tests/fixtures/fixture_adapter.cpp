// Stand-in external forecaster for bridge tests. argv[1] picks a behaviour:
//   persistence  answer with the last value of every window
//   bad-id       answer with the wrong request id
//   nan          answer with a bare NaN token
//   slow         never answer predict requests
//   bad-hello    reply to the handshake with garbage
//   crash        exit right after the handshake
//   wrong-count  answer with one prediction too few

#include <cstdio>
#include <iostream>
#include <string>
#include <thread>

#include <json.hpp>

int main(int argc, char** argv) {
    const std::string mode = argc > 1 ? argv[1] : "persistence";
    std::string line;
    while (std::getline(std::cin, line)) {
        const auto msg = nlohmann::json::parse(line);
        const auto type = msg.at("type").get<std::string>();
        if (type == "hello") {
            if (mode == "bad-hello") {
                std::cout << "{\"type\":\"sup\"}" << std::endl;
                continue;
            }
            std::cout << "{\"type\":\"ready\"}" << std::endl;
            if (mode == "crash") return 3;
        } else if (type == "predict") {
            const auto id = msg.at("id").get<std::uint64_t>();
            if (mode == "slow") {
                std::this_thread::sleep_for(std::chrono::seconds(30));
                return 0;
            }
            if (mode == "nan") {
                std::cout << "{\"type\":\"prediction\",\"id\":" << id << ",\"predictions\":[NaN]}"
                          << std::endl;
                continue;
            }
            nlohmann::json preds = nlohmann::json::array();
            for (const auto& w : msg.at("windows")) preds.push_back(w.back().get<double>());
            if (mode == "wrong-count") preds.erase(preds.begin());
            nlohmann::json out = {{"type", "prediction"},
                                  {"id", mode == "bad-id" ? id + 100 : id},
                                  {"predictions", preds}};
            std::cout << out.dump() << std::endl;
        } else if (type == "bye") {
            return 0;
        }
    }
    return 0;
}
