#pragma once

#include "proofflow/llm_gateway.hpp"
#include "proofflow/prompts.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace proofflow {

enum class Rating { PerfectMatch, MinorInconsistency, MajorInconsistency };

/// "perfect_match", "minor_inconsistency", "major_inconsistency"
std::string_view to_string(Rating rating);
std::optional<Rating> rating_from_string(std::string_view text);

struct ComponentVerdict {
    std::string component_text;
    std::string formal_text;
    Rating rating = Rating::PerfectMatch;

    bool operator==(const ComponentVerdict&) const = default;
};

inline constexpr double kDefaultMinorWeight = 0.5;

/// 1 for a perfect match, `minor_weight` for a minor inconsistency, 0 for a major one.
double rating_score(Rating rating, double minor_weight = kDefaultMinorWeight);

/// Sugeno integral of per-component scores in [0, 1] under the cardinality
/// measure |A|/m, with any zero score forcing 0. Throws ContractViolation on
/// an empty list or an out-of-range score.
double sugeno_integral(std::vector<double> scores);

double aggregate_faithfulness(const std::vector<ComponentVerdict>& verdicts,
                              double minor_weight = kDefaultMinorWeight);

/// Strict parse of {"components": [{"nl", "lean", "rating"}]}; throws ParseError.
std::vector<ComponentVerdict> parse_judge_response(std::string_view text);

struct JudgeResult {
    std::vector<ComponentVerdict> verdicts;
    /// Output stayed unparseable after every attempt.
    bool failed = false;
    std::string error;
    std::vector<ChatExchange> attempts;
};

JudgeResult judge_components(const std::string& nl_statement, const std::string& formal_statement,
                             Provider& provider, const PromptLibrary& prompts, const RetryPolicy& policy);

struct FaithfulnessRecord {
    std::string node_id;
    std::vector<ComponentVerdict> verdicts;
    double f = 0.0;
    /// False when the syntax gate set f = 0 without asking the judge.
    bool judged = false;
    bool judge_failure = false;
    std::vector<ChatExchange> attempts;
};

/// f for one statement: 0 without a judge call when `syntax_ok` is false,
/// otherwise the aggregated judge verdicts (0 and flagged on judge failure).
FaithfulnessRecord score_faithfulness(const std::string& node_id, const std::string& nl_statement,
                                      const std::string& formal_statement, bool syntax_ok, Provider& provider,
                                      const PromptLibrary& prompts, const RetryPolicy& policy,
                                      double minor_weight = kDefaultMinorWeight);

Json faithfulness_to_json(const FaithfulnessRecord& record);
FaithfulnessRecord faithfulness_from_json(const Json& json);

/// (1/n) Σ f·c·structural. Throws ContractViolation when the key sets differ
/// or are empty.
double proof_score(const std::map<std::string, double>& f, const std::map<std::string, bool>& c,
                   const std::map<std::string, bool>& structural);

struct StructureVerdict {
    bool faithful = false;
    std::vector<std::string> used;
    bool failed = false;
    std::vector<ChatExchange> attempts;
};

/// LLM check that a formal proof uses exactly the NL dependencies; only
/// consulted when no ground-truth graph exists.
StructureVerdict judge_structure(const std::string& node_id, const std::string& nl_statement,
                                 const std::string& nl_dependencies, const std::string& proof_source,
                                 Provider& provider, const PromptLibrary& prompts, const RetryPolicy& policy);

Json structure_verdict_to_json(const StructureVerdict& verdict);
StructureVerdict structure_verdict_from_json(const Json& json);

struct NodeScore {
    std::string id;
    double f = 0.0;
    bool c = false;
    bool structural = false;
    std::string error_source;

    bool operator==(const NodeScore&) const = default;
};

struct ScoreReport {
    std::string problem;
    std::string mode;
    int n = 0;
    double proofscore = 0.0;
    std::vector<NodeScore> nodes;

    bool operator==(const ScoreReport&) const = default;
};

/// {"problem", "mode", "n", "proofscore", "nodes": [{"id", "f", "c", "structural", "error_source"}]}
Json score_report_to_json(const ScoreReport& report);
ScoreReport score_report_from_json(const Json& json);

}  // namespace proofflow
