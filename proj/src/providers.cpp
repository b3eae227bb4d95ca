#include "proofflow/providers.hpp"

#include "proofflow/error.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <regex>

namespace proofflow {

std::string redact(std::string text, const std::vector<std::string>& secrets) {
    for (const auto& secret : secrets) {
        if (secret.empty()) continue;
        std::size_t pos = 0;
        while ((pos = text.find(secret, pos)) != std::string::npos) {
            text.replace(pos, secret.size(), "***");
            pos += 3;
        }
    }
    return text;
}

void TraceSink::write(const std::string& provider_id, const std::string& hash, const Json& request_body,
                      const Json& response_body, const std::vector<std::string>& secrets) const {
    Json record = {{"provider_id", provider_id}, {"request_hash", hash}, {"request", request_body},
                   {"response", response_body}};
    std::lock_guard lock(mutex_);
    write_text_file(dir_ / (provider_id + "-" + hash + ".json"), redact(record.dump(2), secrets) + "\n");
}

ProviderConfig provider_config_from_json(const Json& json, const std::filesystem::path& base_dir) {
    if (!json.is_object()) throw ConfigError("provider config must be a JSON object");
    static const std::vector<std::string> known = {"id",          "kind",   "endpoint", "model",    "api_key_env",
                                                   "thinking",    "script", "timeout_s", "fixture_dir"};
    for (const auto& item : json.items())
        if (std::find(known.begin(), known.end(), item.key()) == known.end())
            throw ConfigError("provider config: unknown field '" + item.key() + "'");

    ProviderConfig config;
    try {
        config.id = json.at("id").get<std::string>();
        config.kind = json.value("kind", std::string("http"));
        config.endpoint = json.value("endpoint", std::string());
        config.model = json.value("model", std::string());
        config.api_key_env = json.value("api_key_env", std::string());
        config.thinking = json.value("thinking", false);
        config.timeout_s = json.value("timeout_s", 600);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("provider config: ") + e.what());
    }
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
    };
    if (config.kind == "http") {
        if (config.endpoint.empty()) throw ConfigError("provider '" + config.id + "': missing endpoint");
    } else if (config.kind == "fixture") {
        if (!json.contains("fixture_dir")) throw ConfigError("provider '" + config.id + "': missing fixture_dir");
        config.source = resolve(json.at("fixture_dir").get<std::string>());
    } else if (config.kind == "script") {
        if (!json.contains("script")) throw ConfigError("provider '" + config.id + "': missing script");
        config.source = resolve(json.at("script").get<std::string>());
    } else {
        throw ConfigError("provider '" + config.id + "': unknown kind '" + config.kind + "'");
    }
    return config;
}

// ---------------------------------------------------------------------------
// HttpProvider

HttpProvider::HttpProvider(ProviderConfig config, std::shared_ptr<TraceSink> trace)
    : config_(std::move(config)), trace_(std::move(trace)) {
    static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch match;
    if (!std::regex_match(config_.endpoint, match, url))
        throw ConfigError("provider '" + config_.id + "': malformed endpoint '" + config_.endpoint + "'");
    origin_ = match[1].str();
    path_ = match[2].matched ? match[2].str() : "/";
    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (key == nullptr || *key == '\0')
            throw ConfigError("provider '" + config_.id + "': environment variable " + config_.api_key_env +
                              " is not set");
        api_key_ = key;
    }
}

Json HttpProvider::request_body(const ChatRequest& request) const {
    Json messages = Json::array();
    if (!request.system_prompt.empty())
        messages.push_back({{"role", "system"}, {"content", request.system_prompt}});
    for (const auto& m : request.messages)
        messages.push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
    return {{"model", config_.model},
            {"messages", std::move(messages)},
            {"temperature", request.temperature},
            {"max_tokens", request.max_tokens}};
}

ChatExchange HttpProvider::complete(const ChatRequest& request) {
    validate_request(request);
    const Json body = request_body(request);

    httplib::Client client(origin_);
    client.set_connection_timeout(30);
    client.set_read_timeout(config_.timeout_s);
    client.set_write_timeout(60);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    const auto start = std::chrono::steady_clock::now();
    auto result = client.Post(path_, headers, body.dump(), "application/json");
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();

    if (!result) {
        if (result.error() == httplib::Error::Read || result.error() == httplib::Error::Write)
            throw TimeoutError("provider '" + config_.id + "': " + httplib::to_string(result.error()));
        throw TransportError("provider '" + config_.id + "': " + httplib::to_string(result.error()));
    }
    const auto& response = result.value();
    if (trace_) {
        Json response_body = Json::parse(response.body, nullptr, false);
        if (response_body.is_discarded()) response_body = response.body;
        Json request_record = {{"endpoint", config_.endpoint},
                               {"headers", {{"Authorization", api_key_.empty() ? "" : "Bearer ***"}}},
                               {"body", body}};
        trace_->write(config_.id, request_hash(request), request_record,
                      {{"status", response.status}, {"body", response_body}}, {api_key_});
    }
    if (response.status < 200 || response.status >= 300)
        throw HttpStatusError(response.status, "provider '" + config_.id + "': HTTP " + std::to_string(response.status));

    Json payload = Json::parse(response.body, nullptr, false);
    if (payload.is_discarded() || !payload.is_object())
        throw MalformedPayloadError("provider '" + config_.id + "': response is not a JSON object");

    const Json* content = nullptr;
    if (payload.contains("choices") && payload["choices"].is_array() && !payload["choices"].empty()) {
        const auto& choice = payload["choices"][0];
        if (choice.contains("message") && choice["message"].contains("content"))
            content = &choice["message"]["content"];
    }
    if (content == nullptr || !content->is_string() || content->get<std::string>().empty())
        throw MalformedPayloadError("provider '" + config_.id + "': no message content in response");

    ChatExchange exchange;
    exchange.request = request;
    exchange.response_text = content->get<std::string>();
    exchange.provider_id = config_.id;
    exchange.latency_ms = elapsed;
    const Json usage = payload.value("usage", Json::object());
    if (usage.contains("completion_tokens") && usage["completion_tokens"].is_number_integer() &&
        usage.contains("prompt_tokens") && usage["prompt_tokens"].is_number_integer()) {
        exchange.prompt_tokens = usage["prompt_tokens"].get<std::int64_t>();
        exchange.completion_tokens = usage["completion_tokens"].get<std::int64_t>();
    } else {
        exchange.prompt_tokens = estimate_tokens(body.dump());
        exchange.completion_tokens = estimate_tokens(exchange.response_text);
        exchange.tokens_estimated = true;
    }
    return exchange;
}

// ---------------------------------------------------------------------------
// FixtureProvider

FixtureProvider::FixtureProvider(std::string id, std::filesystem::path dir, bool thinking,
                                 std::shared_ptr<TraceSink> trace)
    : id_(std::move(id)), dir_(std::move(dir)), thinking_(thinking), trace_(std::move(trace)) {}

namespace {

std::string prompt_text(const ChatRequest& request) {
    std::string text = request.system_prompt;
    for (const auto& m : request.messages) text += "\n" + m.content;
    return text;
}

}  // namespace

ChatExchange FixtureProvider::complete(const ChatRequest& request) {
    validate_request(request);
    const std::string hash = request_hash(request);
    const auto path = dir_ / (hash + ".json");
    if (!std::filesystem::exists(path))
        throw FixtureMissingError(hash, "provider '" + id_ + "': no fixture " + path.string());

    Json fixture;
    try {
        fixture = read_json_file(path);
    } catch (const ParseError& e) {
        throw MalformedPayloadError(e.what());
    }
    if (!fixture.is_object() || !fixture.contains("response_text") || !fixture["response_text"].is_string() ||
        fixture["response_text"].get<std::string>().empty())
        throw MalformedPayloadError("provider '" + id_ + "': fixture " + hash + " has an empty response body");

    ChatExchange exchange;
    exchange.request = request;
    exchange.response_text = fixture["response_text"].get<std::string>();
    exchange.provider_id = id_;
    exchange.latency_ms = fixture.value("latency_ms", std::int64_t{0});
    if (fixture.contains("completion_tokens") && fixture.contains("prompt_tokens")) {
        exchange.completion_tokens = fixture["completion_tokens"].get<std::int64_t>();
        exchange.prompt_tokens = fixture["prompt_tokens"].get<std::int64_t>();
        exchange.tokens_estimated = fixture.value("tokens_estimated", false);
    } else {
        exchange.completion_tokens = estimate_tokens(exchange.response_text);
        exchange.prompt_tokens = estimate_tokens(prompt_text(request));
        exchange.tokens_estimated = true;
    }
    if (trace_) trace_->write(id_, hash, request_to_json(request), fixture);
    return exchange;
}

// ---------------------------------------------------------------------------
// ScriptedProvider

ScriptedProvider::ScriptedProvider(std::string id, std::vector<Rule> rules, bool thinking)
    : id_(std::move(id)), rules_(std::move(rules)), thinking_(thinking) {}

namespace {

std::vector<std::string> string_list(const Json& json, const char* key) {
    std::vector<std::string> out;
    if (!json.contains(key)) return out;
    const auto& value = json.at(key);
    if (value.is_string()) return {value.get<std::string>()};
    for (const auto& item : value) out.push_back(item.get<std::string>());
    return out;
}

std::vector<ScriptedProvider::Rule> rules_from_file(const std::filesystem::path& path) {
    const Json script = read_json_file(path);
    const Json& rules = script.is_array() ? script : script.at("rules");
    std::vector<ScriptedProvider::Rule> out;
    for (const auto& r : rules) {
        ScriptedProvider::Rule rule;
        rule.contains = string_list(r, "contains");
        rule.last_contains = string_list(r, "last_contains");
        rule.attempt = r.value("attempt", 0);
        if (r.contains("response_lines")) {
            const auto lines = string_list(r, "response_lines");
            for (std::size_t i = 0; i < lines.size(); ++i) rule.response += (i ? "\n" : "") + lines[i];
        } else {
            rule.response = r.at("response").get<std::string>();
        }
        rule.completion_tokens = r.value("completion_tokens", std::int64_t{-1});
        rule.prompt_tokens = r.value("prompt_tokens", std::int64_t{-1});
        rule.latency_ms = r.value("latency_ms", std::int64_t{0});
        out.push_back(std::move(rule));
    }
    return out;
}

}  // namespace

std::vector<ScriptedProvider::Rule> ScriptedProvider::load_rules(const std::filesystem::path& path) {
    if (!std::filesystem::is_directory(path)) return rules_from_file(path);
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<Rule> rules;
    for (const auto& f : files) {
        auto more = rules_from_file(f);
        rules.insert(rules.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    }
    return rules;
}

ChatExchange ScriptedProvider::complete(const ChatRequest& request) {
    validate_request(request);
    const std::string opening = request.system_prompt + "\n" + request.messages.front().content;
    const std::string& latest = request.messages.back().content;
    const int attempt = static_cast<int>((request.messages.size() + 1) / 2);

    for (const auto& rule : rules_) {
        if (rule.attempt != 0 && rule.attempt != attempt) continue;
        auto in = [](const std::string& hay) {
            return [&hay](const std::string& needle) { return hay.find(needle) != std::string::npos; };
        };
        if (!std::all_of(rule.contains.begin(), rule.contains.end(), in(opening))) continue;
        if (!std::all_of(rule.last_contains.begin(), rule.last_contains.end(), in(latest))) continue;

        ChatExchange exchange;
        exchange.request = request;
        exchange.response_text = rule.response;
        exchange.provider_id = id_;
        exchange.tokens_estimated = rule.completion_tokens < 0 || rule.prompt_tokens < 0;
        exchange.completion_tokens =
            rule.completion_tokens >= 0 ? rule.completion_tokens : estimate_tokens(rule.response);
        exchange.prompt_tokens = rule.prompt_tokens >= 0 ? rule.prompt_tokens : estimate_tokens(prompt_text(request));
        exchange.latency_ms = rule.latency_ms;
        return exchange;
    }
    throw FixtureMissingError(request_hash(request),
                              "provider '" + id_ + "': no script rule matches request (attempt " +
                                  std::to_string(attempt) + "): " + request.messages.front().content.substr(0, 160));
}

// ---------------------------------------------------------------------------

ChatExchange RecordingProvider::complete(const ChatRequest& request) {
    ChatExchange exchange = inner_->complete(request);
    Json fixture = {{"request", request_to_json(request)},
                    {"response_text", exchange.response_text},
                    {"prompt_tokens", exchange.prompt_tokens},
                    {"completion_tokens", exchange.completion_tokens},
                    {"tokens_estimated", exchange.tokens_estimated},
                    {"latency_ms", exchange.latency_ms}};
    write_json_file(dir_ / (request_hash(request) + ".json"), fixture);
    return exchange;
}

std::shared_ptr<Provider> make_provider(const ProviderConfig& config, std::shared_ptr<TraceSink> trace) {
    if (config.kind == "fixture") {
        if (!std::filesystem::is_directory(config.source))
            throw ConfigError("provider '" + config.id + "': fixture_dir " + config.source.string() + " does not exist");
        return std::make_shared<FixtureProvider>(config.id, config.source, config.thinking, std::move(trace));
    }
    if (config.kind == "script") {
        if (!std::filesystem::exists(config.source))
            throw ConfigError("provider '" + config.id + "': script " + config.source.string() + " does not exist");
        return std::make_shared<ScriptedProvider>(config.id, ScriptedProvider::load_rules(config.source),
                                                  config.thinking);
    }
    return std::make_shared<HttpProvider>(config, std::move(trace));
}

}  // namespace proofflow
