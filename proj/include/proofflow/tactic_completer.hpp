#pragma once

#include "proofflow/formalizer.hpp"
#include "proofflow/lean_verifier.hpp"
#include "proofflow/llm_gateway.hpp"
#include "proofflow/stage_options.hpp"

#include <string>
#include <vector>

namespace proofflow {

struct CompletedNode {
    std::string node_id;
    /// Accepted unit body (definitions plus proved theorem); empty unless c_tactic.
    std::string proof_source;
    bool c_tactic = false;
    int passed_at_attempt = 0;
    std::vector<ChatExchange> attempts;
    std::vector<Diagnostic> diagnostics;
    std::string last_error;
    std::int64_t verifier_ms = 0;

    bool negation_attempted = false;
    bool negation_proved = false;
    /// The negated statement never checked, so proving was not attempted.
    bool negation_malformed = false;
    /// The negated conclusion is literally ¬(original conclusion).
    bool negation_structural = false;
    std::string negation_statement;
    std::vector<ChatExchange> negation_attempts;
    /// Both the statement and its negation were proved from the same hypotheses.
    bool hypothesis_inconsistency = false;
};

Json completed_to_json(const CompletedNode& node);
CompletedNode completed_from_json(const Json& json);

/// Replaces the placeholder of a formalized lemma or theorem solution with
/// tactics. Throws ContractViolation unless fnode passed the formalizer and
/// is provable.
CompletedNode complete_tactics(const FormalizedNode& fnode, Provider& provider, Verifier& verifier,
                               const StageOptions& options);

struct NegationOutcome {
    std::string statement;
    bool proved = false;
    bool malformed = false;
    bool structural = false;
    /// Negation-writing attempts followed by proving attempts.
    std::vector<ChatExchange> attempts;
    std::int64_t verifier_ms = 0;
};

/// Asks for the negated statement (hypotheses kept), checks it with the
/// placeholder, then tries to prove it.
NegationOutcome prove_negation(const FormalizedNode& fnode, Provider& provider, Verifier& verifier,
                               const StageOptions& options);

/// Runs prove_negation for a node whose tactics failed and records the outcome.
void attach_negation(CompletedNode& completed, const FormalizedNode& fnode, Provider& provider, Verifier& verifier,
                     const StageOptions& options);

}  // namespace proofflow
