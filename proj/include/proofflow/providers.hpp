#pragma once

#include "proofflow/llm_gateway.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace proofflow {

/// Writes request/response transcripts, one file per request hash, with
/// credentials redacted.
class TraceSink {
public:
    explicit TraceSink(std::filesystem::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& provider_id, const std::string& hash, const Json& request_body,
               const Json& response_body, const std::vector<std::string>& secrets = {}) const;
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    mutable std::mutex mutex_;
};

/// Replaces every occurrence of each non-empty secret with "***".
std::string redact(std::string text, const std::vector<std::string>& secrets);

struct ProviderConfig {
    std::string id;
    /// "http" (default), "fixture" or "script".
    std::string kind = "http";
    std::string endpoint;
    std::string model;
    std::string api_key_env;
    bool thinking = false;
    /// Fixture directory (kind=fixture) or script file/directory (kind=script).
    std::filesystem::path source;
    int timeout_s = 600;
};

/// Parses {"id", "endpoint", "model", "api_key_env", "thinking"} plus the
/// optional "kind", "fixture_dir", "script" and "timeout_s". Relative paths
/// resolve against `base_dir`.
ProviderConfig provider_config_from_json(const Json& json, const std::filesystem::path& base_dir = {});

/// OpenAI-style JSON chat-completion client.
class HttpProvider final : public Provider {
public:
    /// Throws ConfigError when the endpoint is malformed or the api key
    /// variable is named but unset.
    explicit HttpProvider(ProviderConfig config, std::shared_ptr<TraceSink> trace = nullptr);

    std::string id() const override { return config_.id; }
    bool thinking() const override { return config_.thinking; }
    ChatExchange complete(const ChatRequest& request) override;

    /// The exact JSON body POSTed for `request`.
    Json request_body(const ChatRequest& request) const;

private:
    ProviderConfig config_;
    std::string api_key_;
    std::string origin_;  // scheme://host[:port]
    std::string path_;
    std::shared_ptr<TraceSink> trace_;
};

/// Replays {request_hash}.json files: {"response_text", "prompt_tokens"?,
/// "completion_tokens"?, "latency_ms"?}. A pure function of the request.
class FixtureProvider final : public Provider {
public:
    FixtureProvider(std::string id, std::filesystem::path dir, bool thinking = false,
                    std::shared_ptr<TraceSink> trace = nullptr);

    std::string id() const override { return id_; }
    bool thinking() const override { return thinking_; }
    ChatExchange complete(const ChatRequest& request) override;

private:
    std::string id_;
    std::filesystem::path dir_;
    bool thinking_;
    std::shared_ptr<TraceSink> trace_;
};

/// Rule-driven fake model for authoring fixtures and tests. A rule fires
/// when every "contains" string occurs in the system prompt or the first
/// user message, every "last_contains" string occurs in the latest user
/// message, and "attempt" (the number of user turns) matches when given.
/// Rules are tried in file order; the first match wins.
class ScriptedProvider final : public Provider {
public:
    struct Rule {
        std::vector<std::string> contains;
        std::vector<std::string> last_contains;
        int attempt = 0;  // 0 = any
        std::string response;
        std::int64_t completion_tokens = -1;  // -1 = estimate
        std::int64_t prompt_tokens = -1;
        std::int64_t latency_ms = 0;
    };

    ScriptedProvider(std::string id, std::vector<Rule> rules, bool thinking = false);

    /// Loads a single script file or every *.json file of a directory in name order.
    static std::vector<Rule> load_rules(const std::filesystem::path& path);

    std::string id() const override { return id_; }
    bool thinking() const override { return thinking_; }
    ChatExchange complete(const ChatRequest& request) override;

private:
    std::string id_;
    std::vector<Rule> rules_;
    bool thinking_;
};

/// Writes every successful exchange of the inner provider as a fixture file.
class RecordingProvider final : public Provider {
public:
    RecordingProvider(std::shared_ptr<Provider> inner, std::filesystem::path dir)
        : inner_(std::move(inner)), dir_(std::move(dir)) {}

    std::string id() const override { return inner_->id(); }
    bool thinking() const override { return inner_->thinking(); }
    ChatExchange complete(const ChatRequest& request) override;

private:
    std::shared_ptr<Provider> inner_;
    std::filesystem::path dir_;
};

std::shared_ptr<Provider> make_provider(const ProviderConfig& config, std::shared_ptr<TraceSink> trace = nullptr);

}  // namespace proofflow
