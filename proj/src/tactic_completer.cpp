#include "proofflow/tactic_completer.hpp"

#include "proofflow/error.hpp"
#include "proofflow/lean_text.hpp"

namespace proofflow {

Json completed_to_json(const CompletedNode& node) {
    Json attempts = Json::array();
    for (const auto& a : node.attempts) attempts.push_back(exchange_to_json(a));
    Json negation_attempts = Json::array();
    for (const auto& a : node.negation_attempts) negation_attempts.push_back(exchange_to_json(a));
    return {{"node_id", node.node_id},
            {"proof_source", node.c_tactic ? Json(node.proof_source) : Json(nullptr)},
            {"c_tactic", node.c_tactic},
            {"passed_at_attempt", node.passed_at_attempt},
            {"diagnostics", diagnostics_to_json(node.diagnostics)},
            {"last_error", node.last_error},
            {"verifier_ms", node.verifier_ms},
            {"negation_attempted", node.negation_attempted},
            {"negation_proved", node.negation_proved},
            {"negation_malformed", node.negation_malformed},
            {"negation_structural", node.negation_structural},
            {"negation_statement", node.negation_statement},
            {"hypothesis_inconsistency", node.hypothesis_inconsistency},
            {"attempts", std::move(attempts)},
            {"negation_attempts", std::move(negation_attempts)}};
}

CompletedNode completed_from_json(const Json& json) {
    try {
        CompletedNode node;
        node.node_id = json.at("node_id").get<std::string>();
        if (!json.at("proof_source").is_null()) node.proof_source = json.at("proof_source").get<std::string>();
        node.c_tactic = json.at("c_tactic").get<bool>();
        node.passed_at_attempt = json.at("passed_at_attempt").get<int>();
        node.diagnostics = diagnostics_from_json(json.at("diagnostics"));
        node.last_error = json.at("last_error").get<std::string>();
        node.verifier_ms = json.at("verifier_ms").get<std::int64_t>();
        node.negation_attempted = json.at("negation_attempted").get<bool>();
        node.negation_proved = json.at("negation_proved").get<bool>();
        node.negation_malformed = json.at("negation_malformed").get<bool>();
        node.negation_structural = json.at("negation_structural").get<bool>();
        node.negation_statement = json.at("negation_statement").get<std::string>();
        node.hypothesis_inconsistency = json.at("hypothesis_inconsistency").get<bool>();
        for (const auto& a : json.at("attempts")) node.attempts.push_back(exchange_from_json(a));
        for (const auto& a : json.at("negation_attempts")) node.negation_attempts.push_back(exchange_from_json(a));
        return node;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("completed node record: ") + e.what());
    }
}

namespace {

struct ProofAttempt {
    bool passed = false;
    int passed_at_attempt = 0;
    std::string source;
    std::vector<ChatExchange> attempts;
    std::vector<Diagnostic> diagnostics;
    std::string last_error;
    std::int64_t verifier_ms = 0;
};

bool same_header(const lean::Declaration& a, const lean::Declaration& b) {
    return a.binders == b.binders && a.conclusion == b.conclusion;
}

// Asks the prover to fill in `body` (definitions plus one theorem ending in
// the placeholder) and checks the result.
ProofAttempt prove_body(const std::string& node_id, const std::string& body, const std::string& unit_tag,
                        Provider& provider, Verifier& verifier, const StageOptions& options) {
    const auto target = lean::parse_declaration(body);
    if (!target) throw ContractViolation("node '" + node_id + "': statement has no theorem declaration");

    ChatRequest request;
    request.system_prompt = options.prompts.get("tactic.system");
    request.messages.push_back(
        {Role::User, options.prompts.render("tactic.user", {{"node_id", node_id}, {"statement_unit", body}})});

    ProofAttempt out;
    int attempt = 0;
    auto check = [&](const std::string& response) {
        ++attempt;
        const std::string text = lean::strip_code_fences(response);
        out.source = text;
        out.diagnostics.clear();
        if (lean::contains_placeholder(text)) return CheckResult::fail("the proof still contains 'sorry'");
        auto decl = lean::parse_declaration(text);
        if (!decl || !same_header(*decl, *target))
            return CheckResult::fail("the theorem statement was changed; keep it exactly as given and only "
                                     "replace 'sorry'");
        const VerifierReport report =
            verifier.check(make_unit(node_id + "." + unit_tag + "." + std::to_string(attempt), text, options.header));
        out.verifier_ms += report.elapsed_ms;
        out.diagnostics = report.diagnostics;
        if (!report.ok) return CheckResult::fail(first_error_summary(report));
        if (report.contains_sorry_warning) return CheckResult::fail("declaration uses 'sorry'");
        return CheckResult::pass();
    };

    RetryOutcome outcome = retry_with_feedback(provider, request, options.policy, check);
    out.attempts = std::move(outcome.attempts);
    out.passed = outcome.passed;
    out.passed_at_attempt = outcome.passed ? static_cast<int>(out.attempts.size()) : 0;
    out.last_error = outcome.last_error;
    return out;
}

}  // namespace

CompletedNode complete_tactics(const FormalizedNode& fnode, Provider& provider, Verifier& verifier,
                               const StageOptions& options) {
    if (!fnode.c_formalizer || !is_provable(fnode.kind))
        throw ContractViolation("complete_tactics needs a formalized lemma or theorem solution, got '" +
                                fnode.node_id + "'");
    ProofAttempt attempt = prove_body(fnode.node_id, formal_body(fnode), "proof", provider, verifier, options);

    CompletedNode out;
    out.node_id = fnode.node_id;
    out.c_tactic = attempt.passed;
    if (attempt.passed) out.proof_source = attempt.source;
    out.passed_at_attempt = attempt.passed_at_attempt;
    out.attempts = std::move(attempt.attempts);
    out.diagnostics = std::move(attempt.diagnostics);
    out.last_error = std::move(attempt.last_error);
    out.verifier_ms = attempt.verifier_ms;
    return out;
}

NegationOutcome prove_negation(const FormalizedNode& fnode, Provider& provider, Verifier& verifier,
                               const StageOptions& options) {
    if (!fnode.c_formalizer || !is_provable(fnode.kind))
        throw ContractViolation("prove_negation needs a formalized lemma or theorem solution, got '" +
                                fnode.node_id + "'");
    const auto original = lean::parse_declaration(fnode.statement);
    if (!original) throw ContractViolation("node '" + fnode.node_id + "': statement has no theorem declaration");

    ChatRequest request;
    request.system_prompt = options.prompts.get("negation.system");
    request.messages.push_back({Role::User, options.prompts.render("negation.user", {{"statement", fnode.statement}})});

    NegationOutcome out;
    std::string body;
    int attempt = 0;
    auto check = [&](const std::string& response) {
        ++attempt;
        const std::string text = lean::strip_code_fences(response);
        out.statement = text;
        auto decl = lean::parse_declaration(text);
        if (!decl || decl->keyword == "example")
            return CheckResult::fail("expected a single theorem ending in ':= by sorry'");
        if (decl->binders != original->binders)
            return CheckResult::fail("the hypotheses must be kept exactly as in the original statement");
        if (lean::normalize_whitespace(decl->body) != "by sorry")
            return CheckResult::fail("the negated statement must end with ':= by sorry'");
        body = fnode.context.empty() ? text : fnode.context + "\n\n" + text;
        const VerifierReport report = verifier.check(
            make_unit(fnode.node_id + ".negation." + std::to_string(attempt), body, options.header));
        out.verifier_ms += report.elapsed_ms;
        if (!report.ok) return CheckResult::fail(first_error_summary(report));
        return CheckResult::pass();
    };
    RetryOutcome stated = retry_with_feedback(provider, request, options.policy, check);
    out.attempts = std::move(stated.attempts);
    if (!stated.passed) {
        out.malformed = true;
        return out;
    }
    out.structural = lean::is_structural_negation(original->conclusion, lean::parse_declaration(out.statement)->conclusion);

    ProofAttempt proof = prove_body(fnode.node_id, body, "negation_proof", provider, verifier, options);
    out.proved = proof.passed;
    out.verifier_ms += proof.verifier_ms;
    for (auto& a : proof.attempts) out.attempts.push_back(std::move(a));
    return out;
}

void attach_negation(CompletedNode& completed, const FormalizedNode& fnode, Provider& provider, Verifier& verifier,
                     const StageOptions& options) {
    NegationOutcome negation = prove_negation(fnode, provider, verifier, options);
    completed.negation_attempted = true;
    completed.negation_proved = negation.proved;
    completed.negation_malformed = negation.malformed;
    completed.negation_structural = negation.structural;
    completed.negation_statement = negation.statement;
    completed.negation_attempts = std::move(negation.attempts);
    completed.verifier_ms += negation.verifier_ms;
    completed.hypothesis_inconsistency = completed.c_tactic && negation.proved;
}

}  // namespace proofflow
