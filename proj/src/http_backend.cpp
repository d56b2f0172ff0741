#include "accentkit/llm_http.hpp"

#include <cstdlib>

#include "httplib.h"
#include "json.hpp"

namespace accentkit {

HttpChatBackend::HttpChatBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.base_url.empty()) throw ConfigError("backend base_url is empty");
    if (cfg_.model.empty()) throw ConfigError("backend model is empty");
}

std::string HttpChatBackend::complete(const std::string& prompt) {
    nlohmann::json body = {
        {"model", cfg_.model},
        {"messages", nlohmann::json::array({nlohmann::json{
                         {"role", "user"}, {"content", prompt}}})},
        {"temperature", cfg_.temperature},
    };

    httplib::Headers headers;
    if (!cfg_.token_env.empty()) {
        if (const char* token = std::getenv(cfg_.token_env.c_str());
            token && *token) {
            headers.emplace("Authorization", std::string("Bearer ") + token);
        }
    }

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.transport_retries; ++attempt) {
        httplib::Client client(cfg_.base_url);
        client.set_connection_timeout(cfg_.timeout_sec, 0);
        client.set_read_timeout(cfg_.timeout_sec, 0);

        auto res = client.Post(cfg_.path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 200) {
            try {
                auto j = nlohmann::json::parse(res->body);
                return j.at("choices").at(0).at("message").at("content")
                    .get<std::string>();
            } catch (const std::exception& e) {
                throw BackendError(std::string("malformed completion response: ") +
                                   e.what());
            }
        }
        last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
        // Retry server-side and rate-limit statuses; anything else is final.
        if (res->status != 408 && res->status != 429 && res->status < 500) break;
    }
    throw BackendError("backend request to " + cfg_.base_url + cfg_.path +
                       " failed: " + last_error);
}

}  // namespace accentkit
