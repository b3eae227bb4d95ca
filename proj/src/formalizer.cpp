#include "proofflow/formalizer.hpp"

#include "proofflow/error.hpp"
#include "proofflow/lean_text.hpp"

#include <algorithm>
#include <set>

namespace proofflow {

std::string_view to_string(PremiseMode mode) {
    return mode == PremiseMode::DagStrict ? "DagStrict" : "AllPrevious";
}

std::optional<PremiseMode> premise_mode_from_string(std::string_view text) {
    if (text == "DagStrict") return PremiseMode::DagStrict;
    if (text == "AllPrevious") return PremiseMode::AllPrevious;
    return std::nullopt;
}

std::string formal_body(const FormalizedNode& node) {
    return node.context.empty() ? node.statement : node.context + "\n\n" + node.statement;
}

Json formalized_to_json(const FormalizedNode& node) {
    Json attempts = Json::array();
    for (const auto& a : node.attempts) attempts.push_back(exchange_to_json(a));
    return {{"node_id", node.node_id},
            {"kind", to_tag(node.kind)},
            {"statement", node.statement},
            {"context", node.context},
            {"statement_source", node.statement_source},
            {"permitted_premises", node.permitted_premises},
            {"premises_used", node.premises_used},
            {"c_formalizer", node.c_formalizer},
            {"passed_at_attempt", node.passed_at_attempt},
            {"diagnostics", diagnostics_to_json(node.diagnostics)},
            {"last_error", node.last_error},
            {"verifier_ms", node.verifier_ms},
            {"attempts", std::move(attempts)}};
}

FormalizedNode formalized_from_json(const Json& json) {
    try {
        FormalizedNode node;
        node.node_id = json.at("node_id").get<std::string>();
        const auto tag = json.at("kind").get<std::string>();
        auto kind = kind_from_tag(tag);
        if (!kind) throw ParseError("formalized node '" + node.node_id + "': invalid kind \"" + tag + "\"");
        node.kind = *kind;
        node.statement = json.at("statement").get<std::string>();
        node.context = json.at("context").get<std::string>();
        node.statement_source = json.at("statement_source").get<std::string>();
        node.permitted_premises = json.at("permitted_premises").get<std::vector<std::string>>();
        node.premises_used = json.at("premises_used").get<std::vector<std::string>>();
        node.c_formalizer = json.at("c_formalizer").get<bool>();
        node.passed_at_attempt = json.at("passed_at_attempt").get<int>();
        node.diagnostics = diagnostics_from_json(json.at("diagnostics"));
        node.last_error = json.at("last_error").get<std::string>();
        node.verifier_ms = json.at("verifier_ms").get<std::int64_t>();
        for (const auto& a : json.at("attempts")) node.attempts.push_back(exchange_from_json(a));
        return node;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("formalized node record: ") + e.what());
    }
}

std::vector<std::string> permitted_premises(const ProofGraph& graph, const std::string& node_id, PremiseMode mode) {
    std::vector<std::string> out;
    const ProofNode* node = graph.find(node_id);
    if (node == nullptr) throw ContractViolation("unknown node '" + node_id + "'");
    if (mode == PremiseMode::DagStrict) {
        // Declaration order, not the order deps happen to be listed in.
        for (const auto& other : graph.nodes)
            if (std::find(node->deps.begin(), node->deps.end(), other.id) != node->deps.end()) out.push_back(other.id);
        return out;
    }
    for (const auto& other : graph.nodes) {
        if (other.id == node_id) break;
        out.push_back(other.id);
    }
    return out;
}

namespace {

constexpr std::string_view kHeadingPrefix = "### ";

std::string kind_label(NodeKind kind) {
    switch (kind) {
    case NodeKind::TheoremCondition: return "TC, theorem condition";
    case NodeKind::Definition: return "D, definition";
    case NodeKind::Lemma: return "L, lemma";
    case NodeKind::TheoremSolution: return "TS, theorem solution";
    }
    return "?";
}

bool verified(const std::string& id, const std::map<std::string, FormalizedNode>& prior) {
    auto it = prior.find(id);
    return it != prior.end() && it->second.c_formalizer;
}

// Text a premise contributes downstream: its formal statement when there is
// one, otherwise the NL statement as a comment.
std::string premise_text(const std::string& id, const std::map<std::string, FormalizedNode>& prior,
                         const ProofGraph& graph) {
    auto it = prior.find(id);
    if (it != prior.end() && !lean::trim(it->second.statement).empty()) return it->second.statement;
    const ProofNode* node = graph.find(id);
    return "-- " + (node ? node->nl_self_contained : id);
}

std::vector<std::string> used_premises(const std::string& text, const std::vector<std::string>& permitted,
                                       const ProofGraph& graph) {
    const std::set<std::string> candidates(permitted.begin(), permitted.end());
    const auto by_hypothesis = lean::referenced_premises(text, candidates);
    std::vector<std::string> out;
    for (const auto& id : permitted) {
        const ProofNode* node = graph.find(id);
        bool used = by_hypothesis.count(id) > 0;
        if (node && node->kind == NodeKind::Definition && !lean::find_token(text, id).empty()) used = true;
        if (used) out.push_back(id);
    }
    return out;
}

}  // namespace

std::string render_premises(const std::vector<std::string>& premise_ids,
                            const std::map<std::string, FormalizedNode>& prior, const ProofGraph& graph) {
    if (premise_ids.empty()) return "(none)";
    std::string out;
    for (const auto& id : premise_ids) {
        if (!out.empty()) out += "\n\n";
        out += std::string(kHeadingPrefix) + id + (verified(id, prior) ? " [verified]" : " [unverified]") + "\n";
        out += premise_text(id, prior, graph);
    }
    return out;
}

std::vector<std::string> parse_premise_headings(const std::string& prompt_text) {
    std::vector<std::string> ids;
    std::size_t pos = 0;
    while (pos < prompt_text.size()) {
        std::size_t end = prompt_text.find('\n', pos);
        if (end == std::string::npos) end = prompt_text.size();
        std::string_view line(prompt_text.data() + pos, end - pos);
        if (line.substr(0, kHeadingPrefix.size()) == kHeadingPrefix) {
            line.remove_prefix(kHeadingPrefix.size());
            ids.emplace_back(line.substr(0, line.find(' ')));
        }
        pos = end + 1;
    }
    return ids;
}

FormalizedNode formalize_node(const ProofNode& node, const ProofGraph& graph,
                              const std::map<std::string, FormalizedNode>& prior, PremiseMode mode,
                              Provider& provider, Verifier& verifier, const StageOptions& options) {
    FormalizedNode out;
    out.node_id = node.id;
    out.kind = node.kind;
    out.permitted_premises = permitted_premises(graph, node.id, mode);

    for (const auto& id : out.permitted_premises) {
        const ProofNode* premise = graph.find(id);
        if (premise && premise->kind == NodeKind::Definition) {
            if (!out.context.empty()) out.context += "\n\n";
            out.context += premise_text(id, prior, graph);
        }
    }

    std::set<std::string> forbidden;
    for (const auto& other : graph.nodes)
        if (other.id != node.id &&
            std::find(out.permitted_premises.begin(), out.permitted_premises.end(), other.id) ==
                out.permitted_premises.end())
            forbidden.insert(other.id);

    ChatRequest request;
    request.system_prompt = options.prompts.get("formalizer.system");
    request.messages.push_back(
        {Role::User, options.prompts.render("formalizer.user",
                                            {{"node_id", node.id},
                                             {"node_kind", kind_label(node.kind)},
                                             {"statement", node.nl_self_contained},
                                             {"premises", render_premises(out.permitted_premises, prior, graph)}})});

    int attempt = 0;
    auto check = [&](const std::string& response) {
        ++attempt;
        const std::string text = lean::strip_code_fences(response);
        out.statement = text;
        out.diagnostics.clear();
        if (text.empty()) return CheckResult::fail("the answer contained no Lean code");

        std::string body;
        switch (node.kind) {
        case NodeKind::TheoremCondition: {
            body = "example " + text + " : True := by sorry";
            auto decl = lean::parse_declaration(body);
            if (!decl || decl->binders.empty() || decl->conclusion != "True")
                return CheckResult::fail("a theorem condition must be given as a binder list only, e.g. "
                                         "(n : ℤ) (" + lean::hypothesis_name(node.id) + " : Odd n)");
            break;
        }
        case NodeKind::Definition:
            if (lean::find_token(text, "def").empty() && lean::find_token(text, "abbrev").empty())
                return CheckResult::fail("a definition node must be formalized as a single `def` named " + node.id);
            body = out.context.empty() ? text : out.context + "\n\n" + text;
            break;
        case NodeKind::Lemma:
        case NodeKind::TheoremSolution: {
            auto decl = lean::parse_declaration(text);
            if (!decl || decl->keyword == "example")
                return CheckResult::fail("expected a single theorem named " + node.id + " ending in ':= by sorry'");
            if (lean::normalize_whitespace(decl->body) != "by sorry")
                return CheckResult::fail("the statement must end with ':= by sorry' and contain no proof");
            body = out.context.empty() ? text : out.context + "\n\n" + text;
            break;
        }
        }

        std::vector<std::string> stray;
        for (const auto& id : forbidden)
            if (!lean::find_token(text, lean::hypothesis_name(id)).empty()) stray.push_back(lean::hypothesis_name(id));
        if (!stray.empty()) {
            std::string names;
            for (const auto& s : stray) names += (names.empty() ? "" : ", ") + s;
            return CheckResult::fail("uses hypotheses of nodes that are not available premises: " + names);
        }

        const CodeUnit unit = make_unit(node.id + ".statement." + std::to_string(attempt), body, options.header);
        out.statement_source = unit.source;
        const VerifierReport report = verifier.check(unit);
        out.verifier_ms += report.elapsed_ms;
        out.diagnostics = report.diagnostics;
        if (!report.ok) return CheckResult::fail(first_error_summary(report));
        return CheckResult::pass();
    };

    RetryOutcome outcome = retry_with_feedback(provider, request, options.policy, check);
    out.attempts = std::move(outcome.attempts);
    out.c_formalizer = outcome.passed;
    out.passed_at_attempt = outcome.passed ? static_cast<int>(out.attempts.size()) : 0;
    out.last_error = outcome.last_error;
    if (node.kind != NodeKind::TheoremCondition)
        out.premises_used = used_premises(out.statement, out.permitted_premises, graph);
    return out;
}

std::map<std::string, FormalizedNode> formalize_graph(const ProofGraph& graph, PremiseMode mode, Provider& provider,
                                                      Verifier& verifier, const StageOptions& options) {
    std::map<std::string, FormalizedNode> done;
    for (const auto& id : topological_order(graph)) {
        const ProofNode* node = graph.find(id);
        done.emplace(id, formalize_node(*node, graph, done, mode, provider, verifier, options));
    }
    return done;
}

}  // namespace proofflow
