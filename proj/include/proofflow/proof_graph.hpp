#pragma once

#include "proofflow/json.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace proofflow {

enum class NodeKind { TheoremCondition, Definition, Lemma, TheoremSolution };

/// Short wire tag: "TC", "D", "L" or "TS".
std::string_view to_tag(NodeKind kind);
std::optional<NodeKind> kind_from_tag(std::string_view tag);

/// Lemmas and theorem solutions carry a proof obligation; conditions and
/// definitions do not.
inline bool is_provable(NodeKind kind) {
    return kind == NodeKind::Lemma || kind == NodeKind::TheoremSolution;
}

struct ProofNode {
    std::string id;
    NodeKind kind = NodeKind::Lemma;
    std::string nl_original;
    std::string nl_self_contained;
    /// Ids of the prerequisite nodes. Edge (u, v) exists iff u is in v.deps.
    std::vector<std::string> deps;

    bool operator==(const ProofNode&) const = default;
};

struct ProofGraph {
    std::string theorem_nl;
    std::string proof_nl;
    /// Declaration order. For a valid graph this is already topological.
    std::vector<ProofNode> nodes;

    const ProofNode* find(std::string_view id) const;
    bool operator==(const ProofGraph&) const = default;
};

enum class ViolationCode {
    Cycle,
    ForwardReference,
    DanglingNonSolution,
    UnknownDep,
    DuplicateId,
    NoSolution,
    SelfLoop,
    DuplicateDep,
    EmptyStatement,
    // Raised by the graph builder, never by validate_graph.
    ParseFailure,
    InvalidId,
};

std::string_view to_string(ViolationCode code);
std::optional<ViolationCode> violation_code_from_string(std::string_view text);

struct GraphViolation {
    ViolationCode code;
    /// Cycle: members in declaration order. ForwardReference/UnknownDep/
    /// DuplicateDep: {node, dep}. SelfLoop, DanglingNonSolution,
    /// EmptyStatement, InvalidId: {node}. DuplicateId: {id}. NoSolution and
    /// ParseFailure: empty.
    std::vector<std::string> node_ids;
    std::string message;

    bool operator==(const GraphViolation&) const = default;
};

/// Reports every independent violation of the graph invariants. A forward
/// edge that closes a cycle is reported once, as part of that Cycle.
std::vector<GraphViolation> validate_graph(const ProofGraph& graph);

/// Declaration order of a valid graph. Throws ContractViolation when
/// validate_graph reports anything.
std::vector<std::string> topological_order(const ProofGraph& graph);

using DependencySets = std::map<std::string, std::set<std::string>>;

DependencySets dependency_sets(const ProofGraph& graph);

enum class MatchOutcome {
    Matched,
    Mismatched,
    /// No truth graph contains a node with this id.
    Unmatched,
};

inline bool is_match(MatchOutcome outcome) { return outcome == MatchOutcome::Matched; }

/// Per-node structural fidelity: a node matches when its dep set equals the
/// dep set of the same id in at least one truth graph.
std::map<std::string, MatchOutcome> match_dependencies(const ProofGraph& estimate,
                                                       const std::vector<ProofGraph>& truths);

Json graph_to_json(const ProofGraph& graph);

/// {"code", "node_ids", "message"}
Json violation_to_json(const GraphViolation& violation);
GraphViolation violation_from_json(const Json& json);

/// Strict schema conversion: every key required, unknown keys rejected.
/// Throws ParseError naming the offending field (and node id when known).
ProofGraph graph_from_json(const Json& json);

}  // namespace proofflow
