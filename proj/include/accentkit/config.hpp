#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "accentkit/llm_http.hpp"
#include "accentkit/prosody.hpp"

namespace accentkit {

struct MockBackendConfig {
    std::vector<std::pair<std::string, std::string>> rules;  // base -> base
    double cap_rate = 1.0;
};

struct PipelineConfig {
    MelConfig mel;
    PitchConfig pitch;
    double fallback_log_f0 = default_log_f0();

    std::string backend_kind = "mock";  // "mock" | "http"
    HttpBackendConfig http;
    MockBackendConfig mock;

    int retry_budget = 3;
    int workers = 4;
    uint64_t master_seed = 0;
};

// JSON config file; every key is optional and falls back to the defaults
// above.
PipelineConfig load_config(const std::string& path);

std::unique_ptr<EditorBackend> make_backend(const PipelineConfig& config);

}  // namespace accentkit
