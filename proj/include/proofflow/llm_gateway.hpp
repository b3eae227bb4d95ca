#pragma once

#include "proofflow/json.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace proofflow {

enum class Role { User, Assistant };

std::string_view to_string(Role role);

struct ChatMessage {
    Role role = Role::User;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
    std::string system_prompt;
    /// Alternating turns, starting with the user.
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    int max_tokens = 4096;

    bool operator==(const ChatRequest&) const = default;
};

/// Throws ContractViolation unless roles alternate starting with the user,
/// temperature is non-negative and max_tokens positive.
void validate_request(const ChatRequest& request);

/// Stable content hash (hex) over system prompt, messages and sampling
/// parameters. Keys fixture files.
std::string request_hash(const ChatRequest& request);

Json request_to_json(const ChatRequest& request);
ChatRequest request_from_json(const Json& json);

struct ChatExchange {
    ChatRequest request;
    std::string response_text;
    std::int64_t prompt_tokens = 0;
    /// Generated tokens only.
    std::int64_t completion_tokens = 0;
    /// Set when the provider reported no usage and counts were estimated.
    bool tokens_estimated = false;
    std::int64_t latency_ms = 0;
    std::string provider_id;

    bool operator==(const ChatExchange&) const = default;
};

Json exchange_to_json(const ChatExchange& exchange);
ChatExchange exchange_from_json(const Json& json);

/// ceil(chars / 4), the fallback used when a provider reports no usage.
std::int64_t estimate_tokens(const std::string& text);

/// A chat-completion backend. Implementations must tolerate concurrent calls.
class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string id() const = 0;
    /// Thinking-mode tag carried for reporting only.
    virtual bool thinking() const { return false; }
    /// One call, no retries. Throws a BackendError subtype on failure.
    virtual ChatExchange complete(const ChatRequest& request) = 0;
};

inline constexpr const char* kDefaultFeedbackTemplate =
    "Your previous answer was:\n{previous_output}\n\nIt failed with:\n{error}\n\nProduce a corrected answer.";

struct RetryPolicy {
    /// The k of pass@k.
    int max_attempts = 5;
    std::string feedback_template = kDefaultFeedbackTemplate;
};

/// Outcome of checking one model response.
struct CheckResult {
    bool passed = false;
    std::string error;

    static CheckResult pass() { return {true, {}}; }
    static CheckResult fail(std::string error) { return {false, std::move(error)}; }
};

using ResponseCheck = std::function<CheckResult(const std::string& response_text)>;

struct RetryOutcome {
    ChatExchange final_exchange;
    std::vector<ChatExchange> attempts;
    bool passed = false;
    /// Error from the last failed check; empty when passed.
    std::string last_error;
};

std::string render_feedback(const RetryPolicy& policy, const std::string& previous_output, const std::string& error);

/// Ask, check, and on failure append (assistant: previous output, user:
/// rendered feedback) before asking again, up to policy.max_attempts times.
/// Backend errors abort the loop and propagate.
RetryOutcome retry_with_feedback(Provider& provider, const ChatRequest& request, const RetryPolicy& policy,
                                 const ResponseCheck& check);

/// Per-run tally of generated tokens and calls, shared by every stage.
class TokenTally {
public:
    void add(const ChatExchange& exchange) {
        completion_tokens_ += exchange.completion_tokens;
        prompt_tokens_ += exchange.prompt_tokens;
        ++calls_;
    }
    std::int64_t completion_tokens() const { return completion_tokens_.load(); }
    std::int64_t prompt_tokens() const { return prompt_tokens_.load(); }
    std::int64_t calls() const { return calls_.load(); }

private:
    std::atomic<std::int64_t> completion_tokens_{0};
    std::atomic<std::int64_t> prompt_tokens_{0};
    std::atomic<std::int64_t> calls_{0};
};

/// Forwards to an inner provider and records every successful exchange.
class TallyingProvider final : public Provider {
public:
    TallyingProvider(std::shared_ptr<Provider> inner, std::shared_ptr<TokenTally> tally)
        : inner_(std::move(inner)), tally_(std::move(tally)) {}

    std::string id() const override { return inner_->id(); }
    bool thinking() const override { return inner_->thinking(); }
    ChatExchange complete(const ChatRequest& request) override {
        auto exchange = inner_->complete(request);
        tally_->add(exchange);
        return exchange;
    }

private:
    std::shared_ptr<Provider> inner_;
    std::shared_ptr<TokenTally> tally_;
};

}  // namespace proofflow
