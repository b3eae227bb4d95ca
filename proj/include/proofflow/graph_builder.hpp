#pragma once

#include "proofflow/llm_gateway.hpp"
#include "proofflow/proof_graph.hpp"
#include "proofflow/prompts.hpp"

#include <string_view>
#include <vector>

namespace proofflow {

struct GraphBuildResult {
    /// Possibly invalid when passed is false.
    ProofGraph graph;
    std::vector<GraphViolation> violations;
    std::vector<ChatExchange> attempts;
    bool passed = false;
};

/// Parses model output holding one graph object, tolerating surrounding prose
/// and code fences. Throws ParseError naming the offending field.
ProofGraph parse_graph_json(std::string_view text);

/// InvalidId for every node whose id does not follow TC{i}, D{i}, L{i},
/// TS / TS{i} with the prefix matching its kind.
std::vector<GraphViolation> check_id_scheme(const ProofGraph& graph);

/// validate_graph plus the id scheme check.
std::vector<GraphViolation> graph_build_violations(const ProofGraph& graph);

/// One line per violation, for repair feedback.
std::string describe_violations(const std::vector<GraphViolation>& violations);

/// Throws ContractViolation on empty theorem or proof text; backend errors propagate.
GraphBuildResult build_graph(const std::string& theorem_nl, const std::string& proof_nl, Provider& provider,
                             const PromptLibrary& prompts, const RetryPolicy& policy);

/// {"passed", "graph", "violations", "attempts"}
Json build_result_to_json(const GraphBuildResult& result);
GraphBuildResult build_result_from_json(const Json& json);

}  // namespace proofflow
