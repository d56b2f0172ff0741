#pragma once

#include <string>

#include "accentkit/llmedit.hpp"

namespace accentkit {

// Chat-completion-style HTTP endpoint. The bearer token is read from the
// environment variable named in token_env; requests carry the prompt as a
// single user message.
struct HttpBackendConfig {
    std::string base_url = "http://127.0.0.1:8080";
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string token_env;
    double temperature = 0.0;
    int transport_retries = 2;
    int timeout_sec = 120;
};

class HttpChatBackend final : public EditorBackend {
public:
    explicit HttpChatBackend(HttpBackendConfig cfg);
    std::string complete(const std::string& prompt) override;

private:
    HttpBackendConfig cfg_;
};

}  // namespace accentkit
