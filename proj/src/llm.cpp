#include "privstory/llm.hpp"

#include "privstory/error.hpp"
#include "privstory/http.hpp"
#include "privstory/log.hpp"
#include "privstory/text.hpp"

#include <cmath>
#include <fstream>
#include <thread>

namespace privstory {

namespace fs = std::filesystem;

std::string_view provider_kind_key(ProviderKind k) {
    return k == ProviderKind::Replay ? "replay" : "remote_chat";
}

ModelConfig ModelConfig::from_json(const json &j) {
    ModelConfig cfg;
    if (auto kind = j.find("provider_kind"); kind != j.end()) {
        const auto key = kind->get<std::string>();
        if (key == "replay") {
            cfg.provider_kind = ProviderKind::Replay;
        } else if (key == "remote_chat") {
            cfg.provider_kind = ProviderKind::RemoteChat;
        } else {
            throw ConfigError("unknown provider_kind \"" + key + "\"");
        }
    }
    cfg.model_name = j.value("model_name", std::string{});
    cfg.temperature = j.value("temperature", 0.7);
    cfg.max_output_tokens = j.value("max_output_tokens", 2048);
    cfg.responses_per_document = j.value("responses_per_document", 1);
    cfg.request_timeout = std::chrono::seconds(j.value("request_timeout_s", 120));
    if (auto retry = j.find("retry"); retry != j.end()) {
        cfg.retry.max_attempts = retry->value("max_attempts", cfg.retry.max_attempts);
        cfg.retry.initial_backoff = std::chrono::milliseconds(retry->value("backoff_ms", 500));
        cfg.retry.backoff_multiplier = retry->value("backoff_multiplier", 2.0);
    }
    cfg.base_url = env_or_empty("PRIVSTORY_LLM_BASE_URL");
    cfg.api_key = env_or_empty("PRIVSTORY_LLM_API_KEY");
    return cfg;
}

void ModelConfig::validate() const {
    if (model_name.empty()) {
        throw ConfigError("model_name is required");
    }
    if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
        throw ConfigError("temperature must be a finite value >= 0");
    }
    if (max_output_tokens <= 0) {
        throw ConfigError("max_output_tokens must be positive");
    }
    if (retry.max_attempts < 1) {
        throw ConfigError("retry.max_attempts must be at least 1");
    }
    if (responses_per_document < 1) {
        throw ConfigError("responses_per_document must be at least 1");
    }
}

void to_json(json &j, const RawResponse &r) {
    j = json{{"document_id", r.document_id},
             {"response_index", r.response_index},
             {"request_fingerprint", r.request_fingerprint},
             {"model_name", r.model_name},
             {"attempt", r.attempt},
             {"latency_ms", r.latency_ms ? json(*r.latency_ms) : json(nullptr)},
             {"prompt_tokens", r.prompt_tokens ? json(*r.prompt_tokens) : json(nullptr)},
             {"completion_tokens", r.completion_tokens ? json(*r.completion_tokens) : json(nullptr)},
             {"text", r.text}};
}

void from_json(const json &j, RawResponse &r) {
    r.document_id = j.at("document_id").get<std::string>();
    r.response_index = j.value("response_index", 0);
    r.request_fingerprint = j.value("request_fingerprint", std::string{});
    r.model_name = j.value("model_name", std::string{});
    r.attempt = j.value("attempt", 1);
    r.text = j.at("text").get<std::string>();
    if (auto v = j.find("latency_ms"); v != j.end() && v->is_number()) {
        r.latency_ms = v->get<double>();
    }
    if (auto v = j.find("prompt_tokens"); v != j.end() && v->is_number()) {
        r.prompt_tokens = v->get<int>();
    }
    if (auto v = j.find("completion_tokens"); v != j.end() && v->is_number()) {
        r.completion_tokens = v->get<int>();
    }
}

std::string request_fingerprint(const PromptBundle &p, const std::string &model_name, double temperature,
                                 int response_index) {
    const json key = json::array({p.system_text, p.user_text, model_name, temperature, response_index});
    return sha256_hex(key.dump());
}

RemoteChatProvider::RemoteChatProvider()
    : RemoteChatProvider([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {}

RemoteChatProvider::RemoteChatProvider(Sleeper sleeper) : sleep_(std::move(sleeper)) {}

json RemoteChatProvider::build_request(const PromptBundle &p, const ModelConfig &cfg) {
    json messages = json::array();
    if (!p.system_text.empty()) {
        messages.push_back({{"role", "system"}, {"content", p.system_text}});
    }
    messages.push_back({{"role", "user"}, {"content", p.user_text}});
    return json{{"model", cfg.model_name},
                {"messages", std::move(messages)},
                {"temperature", cfg.temperature},
                {"max_tokens", cfg.max_output_tokens}};
}

RawResponse RemoteChatProvider::complete(const PromptBundle &p, const ModelConfig &cfg, int response_index) {
    if (cfg.base_url.empty()) {
        throw GatewayError("no chat endpoint configured (set PRIVSTORY_LLM_BASE_URL)");
    }
    const std::string body = build_request(p, cfg).dump();
    auto backoff = cfg.retry.initial_backoff;
    std::string last_error;
    for (int attempt = 1; attempt <= cfg.retry.max_attempts; ++attempt) {
        const auto started = std::chrono::steady_clock::now();
        try {
            const HttpResponse http = post_json(cfg.base_url, "/chat/completions", body, cfg.api_key,
                                                cfg.request_timeout);
            if (http.status == 429 || http.status >= 500) {
                throw GatewayError("HTTP " + std::to_string(http.status) + ": " + http.body.substr(0, 200), true);
            }
            if (http.status != 200) {
                throw GatewayError("HTTP " + std::to_string(http.status) + ": " + http.body.substr(0, 200), false);
            }
            json reply;
            try {
                reply = json::parse(http.body);
            } catch (const json::parse_error &e) {
                throw GatewayError(std::string("malformed completion response: ") + e.what(), false);
            }
            RawResponse r;
            r.document_id = p.document_id;
            r.response_index = response_index;
            r.model_name = cfg.model_name;
            r.request_fingerprint = request_fingerprint(p, cfg.model_name, cfg.temperature, response_index);
            r.attempt = attempt;
            try {
                const auto &content = reply.at("choices").at(0).at("message").at("content");
                r.text = content.is_string() ? content.get<std::string>() : std::string{};
            } catch (const json::exception &e) {
                throw GatewayError(std::string("completion response without message content: ") + e.what(), false);
            }
            if (trim(r.text).empty()) {
                throw GatewayError(p.document_id + ": empty response text", false);
            }
            if (auto usage = reply.find("usage"); usage != reply.end() && usage->is_object()) {
                if (auto v = usage->find("prompt_tokens"); v != usage->end() && v->is_number()) {
                    r.prompt_tokens = v->get<int>();
                }
                if (auto v = usage->find("completion_tokens"); v != usage->end() && v->is_number()) {
                    r.completion_tokens = v->get<int>();
                }
            }
            r.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
            return r;
        } catch (const GatewayError &e) {
            if (!e.retryable()) {
                throw GatewayError(p.document_id + ": " + e.what(), false);
            }
            last_error = e.what();
            log_warn(p.document_id + ": attempt " + std::to_string(attempt) + " failed: " + last_error);
            if (attempt < cfg.retry.max_attempts) {
                sleep_(backoff);
                backoff = std::chrono::milliseconds(
                    static_cast<long long>(static_cast<double>(backoff.count()) * cfg.retry.backoff_multiplier));
            }
        }
    }
    throw GatewayError(p.document_id + ": endpoint failed after " + std::to_string(cfg.retry.max_attempts) +
                           " attempts: " + last_error,
                       false);
}

ReplayStore::ReplayStore(fs::path dir) : dir_(std::move(dir)) {}

fs::path ReplayStore::record_path(const std::string &fingerprint) const {
    return dir_ / (fingerprint + ".txt");
}

std::optional<std::string> ReplayStore::get(const std::string &fingerprint) const {
    std::shared_lock lock(mutex_);
    const auto path = record_path(fingerprint);
    std::error_code ec;
    if (!fs::exists(path, ec)) {
        return std::nullopt;
    }
    return read_file(path);
}

void ReplayStore::put(const std::string &fingerprint, const std::string &text, const json &meta) {
    std::unique_lock lock(mutex_);
    std::error_code ec;
    fs::create_directories(dir_, ec);
    const auto path = record_path(fingerprint);
    const bool existed = fs::exists(path, ec);
    try {
        write_file_atomic(path, text);
    } catch (const Error &e) {
        throw GatewayError(std::string("replay store unwritable: ") + e.what());
    }
    if (!existed) {
        json line = meta;
        line["fingerprint"] = fingerprint;
        std::ofstream index(dir_ / "index.jsonl", std::ios::app | std::ios::binary);
        if (!index) {
            throw GatewayError("replay store unwritable: " + (dir_ / "index.jsonl").string());
        }
        index << line.dump() << '\n';
    }
}

std::size_t ReplayStore::size() const {
    std::shared_lock lock(mutex_);
    std::size_t n = 0;
    std::error_code ec;
    if (!fs::is_directory(dir_, ec)) {
        return 0;
    }
    for (const auto &entry : fs::directory_iterator(dir_)) {
        n += entry.path().extension() == ".txt" ? 1 : 0;
    }
    return n;
}

RawResponse ReplayProvider::complete(const PromptBundle &p, const ModelConfig &cfg, int response_index) {
    RawResponse r;
    r.document_id = p.document_id;
    r.response_index = response_index;
    r.model_name = cfg.model_name;
    r.request_fingerprint = request_fingerprint(p, cfg.model_name, cfg.temperature, response_index);
    auto text = store_->get(r.request_fingerprint);
    if (!text) {
        throw MissingReplayRecord(r.request_fingerprint);
    }
    if (trim(*text).empty()) {
        throw GatewayError(p.document_id + ": empty response text in replay record " + r.request_fingerprint);
    }
    r.text = std::move(*text);
    return r;
}

RawResponse RecordingProvider::complete(const PromptBundle &p, const ModelConfig &cfg, int response_index) {
    RawResponse r = live_->complete(p, cfg, response_index);
    store_->put(r.request_fingerprint, r.text,
                json{{"document_id", r.document_id},
                     {"response_index", r.response_index},
                     {"model_name", r.model_name},
                     {"temperature", cfg.temperature}});
    return r;
}

std::shared_ptr<ChatProvider> make_provider(const ModelConfig &cfg, const fs::path &store_dir, bool record) {
    auto store = std::make_shared<ReplayStore>(store_dir);
    if (cfg.provider_kind == ProviderKind::Replay) {
        if (record) {
            throw ConfigError("cannot record with the replay provider");
        }
        return std::make_shared<ReplayProvider>(store);
    }
    auto live = std::make_shared<RemoteChatProvider>();
    if (record) {
        return std::make_shared<RecordingProvider>(live, store);
    }
    return live;
}

RawResponse record(const PromptBundle &p, const ModelConfig &cfg, const fs::path &store_dir, int response_index) {
    RecordingProvider provider(std::make_shared<RemoteChatProvider>(), std::make_shared<ReplayStore>(store_dir));
    return provider.complete(p, cfg, response_index);
}

}  // namespace privstory
