#include "accentkit/config.hpp"

#include <fstream>

#include "json.hpp"

namespace accentkit {

using nlohmann::json;

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open config " + path);
    json j;
    try {
        j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const std::exception& e) {
        throw SyntaxError(path + ": " + e.what());
    }

    PipelineConfig cfg;
    if (j.contains("mel")) {
        const auto& m = j["mel"];
        cfg.mel.n_mels = m.value("n_mels", cfg.mel.n_mels);
        cfg.mel.fft_size = m.value("fft_size", cfg.mel.fft_size);
        cfg.mel.hop = m.value("hop", cfg.mel.hop);
        cfg.mel.fmin = m.value("fmin", cfg.mel.fmin);
        cfg.mel.fmax = m.value("fmax", cfg.mel.fmax);
    }
    if (j.contains("pitch")) {
        const auto& p = j["pitch"];
        cfg.pitch.f0_min = p.value("f0_min", cfg.pitch.f0_min);
        cfg.pitch.f0_max = p.value("f0_max", cfg.pitch.f0_max);
        cfg.pitch.window_sec = p.value("window_sec", cfg.pitch.window_sec);
        cfg.pitch.voicing_threshold =
            p.value("voicing_threshold", cfg.pitch.voicing_threshold);
        cfg.fallback_log_f0 = p.value("fallback_log_f0", cfg.fallback_log_f0);
    }
    if (j.contains("backend")) {
        const auto& b = j["backend"];
        cfg.backend_kind = b.value("kind", cfg.backend_kind);
        cfg.http.base_url = b.value("url", cfg.http.base_url);
        cfg.http.path = b.value("path", cfg.http.path);
        cfg.http.model = b.value("model", cfg.http.model);
        cfg.http.token_env = b.value("token_env", cfg.http.token_env);
        cfg.http.temperature = b.value("temperature", cfg.http.temperature);
        cfg.http.transport_retries =
            b.value("transport_retries", cfg.http.transport_retries);
        cfg.http.timeout_sec = b.value("timeout_sec", cfg.http.timeout_sec);
        if (b.contains("rules")) {
            for (const auto& r : b["rules"]) {
                if (!r.is_array() || r.size() != 2) {
                    throw SyntaxError(path + ": backend.rules entries must be "
                                             "[from, to] pairs");
                }
                cfg.mock.rules.emplace_back(r[0].get<std::string>(),
                                            r[1].get<std::string>());
            }
        }
        cfg.mock.cap_rate = b.value("cap_rate", cfg.mock.cap_rate);
    }
    cfg.retry_budget = j.value("retry_budget", cfg.retry_budget);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);

    if (cfg.backend_kind != "mock" && cfg.backend_kind != "http") {
        throw SyntaxError(path + ": backend.kind must be \"mock\" or \"http\"");
    }
    if (cfg.retry_budget < 0) throw SyntaxError(path + ": negative retry_budget");
    if (cfg.workers < 1) throw SyntaxError(path + ": workers must be >= 1");
    return cfg;
}

std::unique_ptr<EditorBackend> make_backend(const PipelineConfig& config) {
    if (config.backend_kind == "http") {
        return std::make_unique<HttpChatBackend>(config.http);
    }
    return std::make_unique<MockRuleBackend>(config.mock.rules,
                                             config.mock.cap_rate);
}

}  // namespace accentkit
