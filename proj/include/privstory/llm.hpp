#pragma once

#include "privstory/json_io.hpp"
#include "privstory/prompt.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

namespace privstory {

enum class ProviderKind { RemoteChat, Replay };

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    double backoff_multiplier = 2.0;
};

struct ModelConfig {
    ProviderKind provider_kind = ProviderKind::RemoteChat;
    std::string model_name;
    double temperature = 0.7;
    int max_output_tokens = 2048;
    /// Sourced from the environment by `from_json`; the replay provider ignores them.
    std::string base_url;
    std::string api_key;
    RetryPolicy retry;
    std::chrono::seconds request_timeout{120};
    /// Independent samples requested per document (response indices 0..n-1).
    int responses_per_document = 1;

    /// Reads `PRIVSTORY_LLM_BASE_URL` / `PRIVSTORY_LLM_API_KEY` for network fields.
    static ModelConfig from_json(const json &j);
    void validate() const;
};

[[nodiscard]] std::string_view provider_kind_key(ProviderKind k);

struct RawResponse {
    std::string document_id;
    int response_index = 0;
    std::string request_fingerprint;
    std::string model_name;
    std::string text;
    std::optional<double> latency_ms;
    std::optional<int> prompt_tokens;
    std::optional<int> completion_tokens;
    int attempt = 1;
};

void to_json(json &j, const RawResponse &r);
void from_json(const json &j, RawResponse &r);

/// SHA-256 over (system text, user text, model name, temperature, response index).
[[nodiscard]] std::string request_fingerprint(const PromptBundle &p, const std::string &model_name,
                                              double temperature, int response_index);

class ChatProvider {
  public:
    virtual ~ChatProvider() = default;
    [[nodiscard]] virtual RawResponse complete(const PromptBundle &p, const ModelConfig &cfg,
                                               int response_index = 0) = 0;
};

/// Chat-completions client (`POST {base}/chat/completions`) with retry and backoff.
class RemoteChatProvider final : public ChatProvider {
  public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    RemoteChatProvider();
    explicit RemoteChatProvider(Sleeper sleeper);

    [[nodiscard]] RawResponse complete(const PromptBundle &p, const ModelConfig &cfg, int response_index) override;

    [[nodiscard]] static json build_request(const PromptBundle &p, const ModelConfig &cfg);

  private:
    Sleeper sleep_;
};

/// Directory of `<fingerprint>.txt` response records plus an append-only `index.jsonl`.
/// Concurrent reads; writes serialized.
class ReplayStore {
  public:
    explicit ReplayStore(std::filesystem::path dir);

    [[nodiscard]] std::optional<std::string> get(const std::string &fingerprint) const;
    /// Overwrites an existing record; the index gains a line only for new fingerprints.
    void put(const std::string &fingerprint, const std::string &text, const json &meta);
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] const std::filesystem::path &dir() const noexcept { return dir_; }

  private:
    [[nodiscard]] std::filesystem::path record_path(const std::string &fingerprint) const;

    std::filesystem::path dir_;
    mutable std::shared_mutex mutex_;
};

class ReplayProvider final : public ChatProvider {
  public:
    explicit ReplayProvider(std::shared_ptr<ReplayStore> store) : store_(std::move(store)) {}
    [[nodiscard]] RawResponse complete(const PromptBundle &p, const ModelConfig &cfg, int response_index) override;

  private:
    std::shared_ptr<ReplayStore> store_;
};

/// Performs a live call through `live` and persists the result into `store`.
class RecordingProvider final : public ChatProvider {
  public:
    RecordingProvider(std::shared_ptr<ChatProvider> live, std::shared_ptr<ReplayStore> store)
        : live_(std::move(live)), store_(std::move(store)) {}
    [[nodiscard]] RawResponse complete(const PromptBundle &p, const ModelConfig &cfg, int response_index) override;

  private:
    std::shared_ptr<ChatProvider> live_;
    std::shared_ptr<ReplayStore> store_;
};

/// Provider for `cfg.provider_kind`; `record` wraps the live client to persist into `store_dir`.
[[nodiscard]] std::shared_ptr<ChatProvider> make_provider(const ModelConfig &cfg,
                                                          const std::filesystem::path &store_dir, bool record);

/// Live call persisted into the replay store at `store_dir`.
RawResponse record(const PromptBundle &p, const ModelConfig &cfg, const std::filesystem::path &store_dir,
                   int response_index = 0);

}  // namespace privstory
