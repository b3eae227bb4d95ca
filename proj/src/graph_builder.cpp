#include "proofflow/graph_builder.hpp"

#include "proofflow/error.hpp"
#include "proofflow/lean_text.hpp"

#include <optional>
#include <regex>

namespace proofflow {

ProofGraph parse_graph_json(std::string_view text) { return graph_from_json(extract_json_object(text)); }

std::vector<GraphViolation> check_id_scheme(const ProofGraph& graph) {
    static const std::regex scheme(R"(^(TC|D|L)[1-9][0-9]*$|^TS([1-9][0-9]*)?$)");
    std::vector<GraphViolation> out;
    for (const auto& node : graph.nodes) {
        const std::string prefix(to_tag(node.kind));
        const bool ok = std::regex_match(node.id, scheme) && node.id.rfind(prefix, 0) == 0;
        if (!ok)
            out.push_back({ViolationCode::InvalidId, {node.id},
                           "node '" + node.id + "' (" + prefix + ") must be named " + prefix +
                               (node.kind == NodeKind::TheoremSolution ? " or TS<n>" : "<n>")});
    }
    return out;
}

std::vector<GraphViolation> graph_build_violations(const ProofGraph& graph) {
    auto violations = validate_graph(graph);
    for (auto& v : check_id_scheme(graph)) violations.push_back(std::move(v));
    return violations;
}

std::string describe_violations(const std::vector<GraphViolation>& violations) {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += '\n';
        out += "- ";
        out += to_string(v.code);
        out += ": ";
        out += v.message;
    }
    return out;
}

GraphBuildResult build_graph(const std::string& theorem_nl, const std::string& proof_nl, Provider& provider,
                             const PromptLibrary& prompts, const RetryPolicy& policy) {
    if (lean::trim(theorem_nl).empty() || lean::trim(proof_nl).empty())
        throw ContractViolation("build_graph needs non-empty theorem and proof text");

    ChatRequest request;
    request.system_prompt = prompts.get("graph_builder.system");
    request.messages.push_back(
        {Role::User, prompts.render("graph_builder.user", {{"theorem", theorem_nl}, {"proof", proof_nl}})});

    std::optional<ProofGraph> last_graph;
    bool last_parsed = false;
    std::string parse_error;
    auto check = [&](const std::string& response) {
        try {
            ProofGraph graph = parse_graph_json(response);
            graph.theorem_nl = theorem_nl;
            graph.proof_nl = proof_nl;
            last_graph = graph;
            last_parsed = true;
        } catch (const ParseError& e) {
            last_parsed = false;
            parse_error = e.what();
            return CheckResult::fail(std::string("the graph JSON could not be parsed: ") + e.what());
        }
        auto violations = graph_build_violations(*last_graph);
        if (violations.empty()) return CheckResult::pass();
        return CheckResult::fail("the graph violates these rules:\n" + describe_violations(violations));
    };

    RetryOutcome outcome = retry_with_feedback(provider, request, policy, check);

    GraphBuildResult result;
    result.attempts = std::move(outcome.attempts);
    result.passed = outcome.passed;
    if (last_graph) {
        result.graph = *last_graph;
    } else {
        result.graph.theorem_nl = theorem_nl;
        result.graph.proof_nl = proof_nl;
    }
    if (!last_parsed)
        result.violations.push_back({ViolationCode::ParseFailure, {}, parse_error});
    else
        result.violations = graph_build_violations(result.graph);
    return result;
}

Json build_result_to_json(const GraphBuildResult& result) {
    Json violations = Json::array();
    for (const auto& v : result.violations) violations.push_back(violation_to_json(v));
    Json attempts = Json::array();
    for (const auto& a : result.attempts) attempts.push_back(exchange_to_json(a));
    return {{"passed", result.passed},
            {"graph", graph_to_json(result.graph)},
            {"violations", std::move(violations)},
            {"attempts", std::move(attempts)}};
}

GraphBuildResult build_result_from_json(const Json& json) {
    try {
        GraphBuildResult result;
        result.passed = json.at("passed").get<bool>();
        result.graph = graph_from_json(json.at("graph"));
        for (const auto& v : json.at("violations")) result.violations.push_back(violation_from_json(v));
        for (const auto& a : json.at("attempts")) result.attempts.push_back(exchange_from_json(a));
        return result;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("graph build record: ") + e.what());
    }
}

}  // namespace proofflow
