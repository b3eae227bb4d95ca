#pragma once

#include "proofflow/lean_verifier.hpp"
#include "proofflow/llm_gateway.hpp"
#include "proofflow/proof_graph.hpp"
#include "proofflow/stage_options.hpp"

#include <map>
#include <string>
#include <vector>

namespace proofflow {

enum class PremiseMode {
    /// Exactly the node's graph dependencies.
    DagStrict,
    /// Every node declared before it.
    AllPrevious,
};

std::string_view to_string(PremiseMode mode);
std::optional<PremiseMode> premise_mode_from_string(std::string_view text);

struct FormalizedNode {
    std::string node_id;
    NodeKind kind = NodeKind::Lemma;
    /// The node's own formal text: a binder list (TC), a definition (D) or a
    /// theorem ending in `:= by sorry` (L, TS). Best attempt when c_formalizer is false.
    std::string statement;
    /// Definitions of permitted Definition premises, placed before the statement.
    std::string context;
    /// The complete checked unit.
    std::string statement_source;
    std::vector<std::string> permitted_premises;
    std::vector<std::string> premises_used;
    bool c_formalizer = false;
    /// 1-based attempt that passed; 0 when none did.
    int passed_at_attempt = 0;
    std::vector<ChatExchange> attempts;
    /// Report of the last checked unit (empty when no attempt reached the checker).
    std::vector<Diagnostic> diagnostics;
    std::string last_error;
    std::int64_t verifier_ms = 0;
};

/// `context` followed by `statement`, the text a unit is built from.
std::string formal_body(const FormalizedNode& node);

Json formalized_to_json(const FormalizedNode& node);
FormalizedNode formalized_from_json(const Json& json);

/// Ids the node may use as premises under `mode`, in declaration order.
std::vector<std::string> permitted_premises(const ProofGraph& graph, const std::string& node_id, PremiseMode mode);

/// The premise block shown to the model; one "### <id> [verified|unverified]"
/// heading per premise followed by its formal text.
std::string render_premises(const std::vector<std::string>& premise_ids,
                            const std::map<std::string, FormalizedNode>& prior, const ProofGraph& graph);

/// Ids named in the "### <id>" headings of a rendered premise block.
std::vector<std::string> parse_premise_headings(const std::string& prompt_text);

/// Formalizes one node. Premises missing from `prior` are rendered from
/// their NL statement and marked unverified.
FormalizedNode formalize_node(const ProofNode& node, const ProofGraph& graph,
                              const std::map<std::string, FormalizedNode>& prior, PremiseMode mode,
                              Provider& provider, Verifier& verifier, const StageOptions& options);

/// Formalizes every node of a valid graph in declaration order.
std::map<std::string, FormalizedNode> formalize_graph(const ProofGraph& graph, PremiseMode mode, Provider& provider,
                                                      Verifier& verifier, const StageOptions& options);

}  // namespace proofflow
