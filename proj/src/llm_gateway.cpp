#include "proofflow/llm_gateway.hpp"

#include "proofflow/error.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>

namespace proofflow {

std::string_view to_string(Role role) { return role == Role::User ? "user" : "assistant"; }

void validate_request(const ChatRequest& request) {
    if (request.messages.empty()) throw ContractViolation("chat request has no messages");
    for (std::size_t i = 0; i < request.messages.size(); ++i) {
        Role expected = i % 2 == 0 ? Role::User : Role::Assistant;
        if (request.messages[i].role != expected)
            throw ContractViolation("chat request message " + std::to_string(i) + " should have role " +
                                    std::string(to_string(expected)));
    }
    if (request.temperature < 0.0) throw ContractViolation("temperature must be >= 0");
    if (request.max_tokens <= 0) throw ContractViolation("max_tokens must be positive");
}

Json request_to_json(const ChatRequest& request) {
    Json messages = Json::array();
    for (const auto& m : request.messages)
        messages.push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
    return {{"system_prompt", request.system_prompt},
            {"messages", std::move(messages)},
            {"temperature", request.temperature},
            {"max_tokens", request.max_tokens}};
}

ChatRequest request_from_json(const Json& json) {
    ChatRequest request;
    request.system_prompt = json.at("system_prompt").get<std::string>();
    for (const auto& m : json.at("messages")) {
        const auto role = m.at("role").get<std::string>();
        if (role != "user" && role != "assistant") throw ParseError("unknown chat role '" + role + "'");
        request.messages.push_back({role == "user" ? Role::User : Role::Assistant, m.at("content").get<std::string>()});
    }
    request.temperature = json.at("temperature").get<double>();
    request.max_tokens = json.at("max_tokens").get<int>();
    return request;
}

std::string request_hash(const ChatRequest& request) {
    const std::string canonical = request_to_json(request).dump();
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    if (EVP_Digest(canonical.data(), canonical.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 failed");
    std::string hex;
    for (unsigned int i = 0; i < 16 && i < length; ++i) {
        char buf[3];
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

Json exchange_to_json(const ChatExchange& exchange) {
    return {{"provider_id", exchange.provider_id},
            {"request", request_to_json(exchange.request)},
            {"response_text", exchange.response_text},
            {"prompt_tokens", exchange.prompt_tokens},
            {"completion_tokens", exchange.completion_tokens},
            {"tokens_estimated", exchange.tokens_estimated},
            {"latency_ms", exchange.latency_ms}};
}

ChatExchange exchange_from_json(const Json& json) {
    ChatExchange exchange;
    exchange.provider_id = json.at("provider_id").get<std::string>();
    exchange.request = request_from_json(json.at("request"));
    exchange.response_text = json.at("response_text").get<std::string>();
    exchange.prompt_tokens = json.at("prompt_tokens").get<std::int64_t>();
    exchange.completion_tokens = json.at("completion_tokens").get<std::int64_t>();
    exchange.tokens_estimated = json.at("tokens_estimated").get<bool>();
    exchange.latency_ms = json.at("latency_ms").get<std::int64_t>();
    return exchange;
}

std::int64_t estimate_tokens(const std::string& text) {
    return static_cast<std::int64_t>((text.size() + 3) / 4);
}

namespace {

void replace_all(std::string& text, const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
}

}  // namespace

std::string render_feedback(const RetryPolicy& policy, const std::string& previous_output, const std::string& error) {
    // Substitute {error} first so a previous output that happens to contain
    // the literal "{error}" is left alone.
    std::string text = policy.feedback_template;
    const std::string marker = "\x01PREVIOUS\x01";
    replace_all(text, "{previous_output}", marker);
    replace_all(text, "{error}", error);
    replace_all(text, marker, previous_output);
    return text;
}

RetryOutcome retry_with_feedback(Provider& provider, const ChatRequest& request, const RetryPolicy& policy,
                                 const ResponseCheck& check) {
    if (policy.max_attempts < 1) throw ContractViolation("RetryPolicy.max_attempts must be >= 1");
    validate_request(request);

    RetryOutcome outcome;
    ChatRequest conversation = request;
    for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
        ChatExchange exchange = provider.complete(conversation);
        outcome.attempts.push_back(exchange);
        outcome.final_exchange = exchange;

        CheckResult result = check(exchange.response_text);
        if (result.passed) {
            outcome.passed = true;
            outcome.last_error.clear();
            return outcome;
        }
        outcome.last_error = result.error;
        conversation.messages.push_back({Role::Assistant, exchange.response_text});
        conversation.messages.push_back({Role::User, render_feedback(policy, exchange.response_text, result.error)});
    }
    return outcome;
}

}  // namespace proofflow
