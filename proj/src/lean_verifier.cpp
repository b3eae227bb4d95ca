#include "proofflow/lean_verifier.hpp"

#include "proofflow/error.hpp"
#include "proofflow/lean_text.hpp"

#include <httplib.h>

#include <algorithm>
#include <regex>

namespace proofflow {

CodeUnit make_unit(std::string unit_id, const std::string& body, const std::string& header) {
    CodeUnit unit;
    unit.unit_id = std::move(unit_id);
    unit.imports_header = header;
    unit.source = header.empty() ? body : header + "\n\n" + body;
    return unit;
}

VerifierReport finalize_report(VerifierReport report) {
    std::stable_sort(report.diagnostics.begin(), report.diagnostics.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.line, a.col) < std::tie(b.line, b.col);
    });
    report.ok = std::none_of(report.diagnostics.begin(), report.diagnostics.end(),
                             [](const Diagnostic& d) { return d.severity == Severity::Error; });
    report.contains_sorry_warning =
        std::any_of(report.diagnostics.begin(), report.diagnostics.end(), [](const Diagnostic& d) {
            return d.severity == Severity::Warning && d.message.find("sorry") != std::string::npos;
        });
    return report;
}

std::string first_error_summary(const VerifierReport& report) {
    if (report.ok) throw ContractViolation("first_error_summary called on an ok report for '" + report.unit_id + "'");
    const Diagnostic* first = nullptr;
    for (const auto& d : report.diagnostics) {
        if (d.severity != Severity::Error) continue;
        if (first == nullptr || std::tie(d.line, d.col) < std::tie(first->line, first->col)) first = &d;
    }
    if (first == nullptr) throw ContractViolation("report for '" + report.unit_id + "' is not ok but has no error");
    std::string message = first->message;
    std::replace(message.begin(), message.end(), '\n', ' ');
    return "L" + std::to_string(first->line) + ":" + std::to_string(first->col) + ": " + message;
}

Json diagnostics_to_json(const std::vector<Diagnostic>& diagnostics) {
    Json out = Json::array();
    for (const auto& d : diagnostics)
        out.push_back({{"severity", d.severity == Severity::Error ? "error" : "warning"},
                       {"line", d.line},
                       {"col", d.col},
                       {"message", d.message}});
    return out;
}

namespace {

Severity severity_from_string(const std::string& s) {
    if (s == "error") return Severity::Error;
    if (s == "warning" || s == "info" || s == "information") return Severity::Warning;
    throw MalformedPayloadError("unknown diagnostic severity '" + s + "'");
}

}  // namespace

std::vector<Diagnostic> diagnostics_from_json(const Json& json) {
    std::vector<Diagnostic> out;
    for (const auto& d : json)
        out.push_back({severity_from_string(d.at("severity").get<std::string>()), d.at("line").get<int>(),
                       d.at("col").get<int>(), d.at("message").get<std::string>()});
    return out;
}

Json report_to_wire(const VerifierReport& report) {
    return {{"unit_id", report.unit_id},
            {"ok", report.ok},
            {"diagnostics", diagnostics_to_json(report.diagnostics)},
            {"elapsed_ms", report.elapsed_ms}};
}

VerifierReport report_from_wire(const Json& json) {
    try {
        VerifierReport report;
        report.unit_id = json.at("unit_id").get<std::string>();
        report.diagnostics = diagnostics_from_json(json.at("diagnostics"));
        report.elapsed_ms = json.at("elapsed_ms").get<std::int64_t>();
        const bool claimed_ok = json.at("ok").get<bool>();
        report = finalize_report(std::move(report));
        if (claimed_ok != report.ok)
            throw MalformedPayloadError("verifier response for '" + report.unit_id +
                                        "': ok flag disagrees with its diagnostics");
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedPayloadError(std::string("verifier response: ") + e.what());
    }
}

Json report_to_json(const VerifierReport& report) {
    Json out = report_to_wire(report);
    out["contains_sorry_warning"] = report.contains_sorry_warning;
    return out;
}

VerifierReport report_from_json(const Json& json) {
    VerifierReport report;
    report.unit_id = json.at("unit_id").get<std::string>();
    report.ok = json.at("ok").get<bool>();
    report.diagnostics = diagnostics_from_json(json.at("diagnostics"));
    report.elapsed_ms = json.at("elapsed_ms").get<std::int64_t>();
    report.contains_sorry_warning = json.at("contains_sorry_warning").get<bool>();
    return report;
}

Json unit_to_json(const CodeUnit& unit) {
    return {{"unit_id", unit.unit_id}, {"imports_header", unit.imports_header}, {"source", unit.source}};
}

CodeUnit unit_from_json(const Json& json) {
    return {json.at("source").get<std::string>(), json.at("imports_header").get<std::string>(),
            json.at("unit_id").get<std::string>()};
}

// ---------------------------------------------------------------------------
// HttpVerifier

HttpVerifier::HttpVerifier(std::string base_url, int timeout_s, int parallelism)
    : timeout_s_(timeout_s), slots_(std::clamp(parallelism, 1, 64)) {
    static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch match;
    if (!std::regex_match(base_url, match, url)) throw ConfigError("malformed verifier url '" + base_url + "'");
    origin_ = match[1].str();
    path_prefix_ = match[2].matched ? match[2].str() : "";
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

std::string HttpVerifier::request_body(const CodeUnit& unit) const {
    Json body = {{"unit_id", unit.unit_id}, {"source", unit.source}, {"timeout_s", timeout_s_}};
    return body.dump();
}

VerifierReport HttpVerifier::check(const CodeUnit& unit) {
    slots_.acquire();
    struct Release {
        std::counting_semaphore<64>& s;
        ~Release() { s.release(); }
    } release{slots_};

    httplib::Client client(origin_);
    client.set_connection_timeout(10);
    client.set_read_timeout(timeout_s_);
    auto result = client.Post(path_prefix_ + "/verify", request_body(unit), "application/json");
    if (!result) {
        if (result.error() == httplib::Error::Read)
            throw TimeoutError("verifier timed out on '" + unit.unit_id + "'");
        throw TransportError("verifier unreachable at " + origin_ + ": " + httplib::to_string(result.error()));
    }
    if (result->status < 200 || result->status >= 300)
        throw HttpStatusError(result->status, "verifier returned HTTP " + std::to_string(result->status));
    Json payload = Json::parse(result->body, nullptr, false);
    if (payload.is_discarded()) throw MalformedPayloadError("verifier response is not JSON");
    return report_from_wire(payload);
}

// ---------------------------------------------------------------------------
// MockVerifier

MockVerifier MockVerifier::from_json(const Json& json) {
    std::map<std::string, VerifierReport> table;
    std::vector<Rule> rules;
    for (const auto& entry : json.value("table", Json::array()))
        table.emplace(entry.at("source").get<std::string>(), report_from_wire(entry.at("report")));
    for (const auto& r : json.value("rules", Json::array()))
        rules.push_back({r.at("contains").get<std::string>(),
                         severity_from_string(r.value("severity", std::string("error"))),
                         r.at("message").get<std::string>()});
    return MockVerifier(std::move(table), std::move(rules));
}

MockVerifier MockVerifier::from_file(const std::filesystem::path& path) { return from_json(read_json_file(path)); }

namespace {

std::string closer_for(std::string_view opener) {
    if (opener == "(") return ")";
    if (opener == "[") return "]";
    if (opener == "{") return "}";
    if (opener == "⟨") return "⟩";
    return "⦄";
}

struct Bracket {
    std::string_view text;
    bool open;
};

std::optional<Bracket> bracket_at(std::string_view s, std::size_t i) {
    static const std::vector<Bracket> all = {{"(", true},  {"[", true},  {"{", true},  {"⟨", true},  {"⦃", true},
                                             {")", false}, {"]", false}, {"}", false}, {"⟩", false}, {"⦄", false}};
    for (const auto& b : all)
        if (s.compare(i, b.text.size(), b.text) == 0) return b;
    return std::nullopt;
}

std::optional<Diagnostic> check_delimiters(const std::string& source, const std::string& masked) {
    std::vector<std::pair<std::string, std::size_t>> stack;
    for (std::size_t i = 0; i < masked.size();) {
        auto b = bracket_at(masked, i);
        if (!b) {
            ++i;
            continue;
        }
        if (b->open) {
            stack.emplace_back(std::string(b->text), i);
        } else {
            const std::string expected = stack.empty() ? "" : closer_for(stack.back().first);
            if (expected != b->text) {
                auto [line, col] = lean::line_col(source, i);
                return Diagnostic{Severity::Error, line, col,
                                  "unexpected token '" + std::string(b->text) + "'; expected " +
                                      (expected.empty() ? std::string("command") : "'" + expected + "'")};
            }
            stack.pop_back();
        }
        i += b->text.size();
    }
    if (!stack.empty()) {
        auto [line, col] = lean::line_col(source, source.size());
        return Diagnostic{Severity::Error, line, col,
                          "unexpected end of input; expected '" + closer_for(stack.back().first) + "'"};
    }
    return std::nullopt;
}

const std::vector<std::string>& command_keywords() {
    static const std::vector<std::string> words = {"theorem", "lemma",     "def",       "abbrev", "example",
                                                   "axiom",   "instance",  "structure", "inductive",
                                                   "variable", "noncomputable", "open", "namespace", "section"};
    return words;
}

}  // namespace

VerifierReport MockVerifier::check(const CodeUnit& unit) {
    if (auto it = table_.find(unit.source); it != table_.end()) {
        VerifierReport replay = it->second;
        replay.unit_id = unit.unit_id;
        return replay;
    }

    const std::string& source = unit.source;
    const std::string masked = lean::mask_comments_and_strings(source);
    VerifierReport report;
    report.unit_id = unit.unit_id;

    bool has_command = false;
    std::size_t first_content = std::string::npos;
    std::vector<std::size_t> declaration_starts;
    for (std::size_t line_start = 0; line_start < masked.size();) {
        std::size_t line_end = masked.find('\n', line_start);
        if (line_end == std::string::npos) line_end = masked.size();
        const std::string line = lean::trim(std::string_view(masked).substr(line_start, line_end - line_start));
        if (!line.empty() && line.rfind("import ", 0) != 0) {
            if (first_content == std::string::npos) first_content = masked.find_first_not_of(" \t", line_start);
            std::string rest = line;
            if (rest.rfind("@[", 0) == 0) {
                const auto close = rest.find(']');
                rest = close == std::string::npos ? std::string() : lean::trim(rest.substr(close + 1));
            }
            for (std::string_view modifier : {"private ", "protected "})
                if (rest.rfind(modifier, 0) == 0) rest = lean::trim(rest.substr(modifier.size()));
            const std::string first_word = rest.substr(0, rest.find_first_of(" \t("));
            const auto& words = command_keywords();
            if (std::find(words.begin(), words.end(), first_word) != words.end()) has_command = true;
            if (first_word == "theorem" || first_word == "lemma" || first_word == "example")
                declaration_starts.push_back(masked.find(first_word, line_start));
        }
        line_start = line_end + 1;
    }

    if (!has_command) {
        auto [line, col] = lean::line_col(source, first_content == std::string::npos ? source.size() : first_content);
        report.diagnostics.push_back({Severity::Error, line, col, "unexpected token; expected command"});
    } else if (auto delim = check_delimiters(source, masked)) {
        report.diagnostics.push_back(*delim);
    } else {
        for (std::size_t start : declaration_starts) {
            auto decl = lean::parse_declaration(std::string_view(source).substr(start));
            auto [line, col] = lean::line_col(source, start);
            if (!decl) {
                report.diagnostics.push_back({Severity::Error, line, col, "unexpected token; expected ':'"});
            } else if (decl->assign_offset == std::string::npos) {
                auto [eline, ecol] = lean::line_col(source, source.size());
                report.diagnostics.push_back({Severity::Error, eline, ecol, "unexpected end of input; expected ':='"});
            } else if (decl->body.empty() || decl->body == "by") {
                auto [eline, ecol] = lean::line_col(source, source.size());
                report.diagnostics.push_back({Severity::Error, eline, ecol, "unexpected end of input; expected term"});
            }
        }
    }

    for (const auto& rule : rules_) {
        auto pos = source.find(rule.contains);
        if (pos == std::string::npos) continue;
        auto [line, col] = lean::line_col(source, pos);
        report.diagnostics.push_back({rule.severity, line, col, rule.message});
    }
    for (std::size_t pos : lean::find_token(source, lean::kPlaceholder)) {
        auto [line, col] = lean::line_col(source, pos);
        report.diagnostics.push_back({Severity::Warning, line, col, "declaration uses 'sorry'"});
    }
    return finalize_report(std::move(report));
}

}  // namespace proofflow
