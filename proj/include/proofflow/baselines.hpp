#pragma once

#include "proofflow/lean_verifier.hpp"
#include "proofflow/llm_gateway.hpp"
#include "proofflow/scoring.hpp"
#include "proofflow/stage_options.hpp"

#include <string>
#include <vector>

namespace proofflow {

enum class BaselineKind { FullProof, StepProof };

std::string_view to_string(BaselineKind kind);

enum class StepStatus {
    Passed,
    Failed,
    /// Not attempted because an earlier step failed.
    CascadeFailed,
};

std::string_view to_string(StepStatus status);

struct BaselineUnit {
    /// "proof" for the full-proof baseline, "step<i>" for step i.
    std::string label;
    std::string nl_text;
    /// Accepted model output, or the last attempt's output on failure.
    std::string model_output;
    CodeUnit unit;
    VerifierReport report;
    StepStatus status = StepStatus::Failed;
    int passed_at_attempt = 0;
    std::vector<ChatExchange> attempts;
};

struct BaselineRun {
    BaselineKind kind = BaselineKind::FullProof;
    std::vector<BaselineUnit> units;
    bool proof_level_ok = false;

    std::vector<ChatExchange> all_attempts() const;
};

Json baseline_to_json(const BaselineRun& run);
BaselineRun baseline_from_json(const Json& json);

/// One prompt for the whole theorem and proof, retried with error feedback.
BaselineRun run_full_proof(const std::string& theorem_nl, const std::string& proof_nl, Provider& provider,
                           Verifier& verifier, const StageOptions& options);

/// One tactic block per step appended to a growing script. A step that
/// exhausts its attempts halts the run; later steps become CascadeFailed.
/// Intermediate scripts may leave goals open ("unsolved goals" is tolerated
/// before the last step).
BaselineRun run_step_proof(const std::string& theorem_nl, const std::vector<std::string>& proof_steps,
                           Provider& provider, Verifier& verifier, const StageOptions& options);

/// Passing steps over all steps (the step-level tactic accuracy).
double step_accuracy(const BaselineRun& run);

struct BaselineScore {
    ScoreReport report;
    std::vector<FaithfulnessRecord> records;
};

/// Judge call per unit that checked; units that did not check get f = 0 unjudged.
std::vector<FaithfulnessRecord> judge_baseline(const BaselineRun& run, Provider& judge, const PromptLibrary& prompts,
                                               const RetryPolicy& policy, double minor_weight = kDefaultMinorWeight);

/// Pure assembly from recorded faithfulness (one record per unit, by label).
ScoreReport baseline_score_report(const BaselineRun& run, const std::string& problem_id,
                                  const std::vector<FaithfulnessRecord>& records);

/// Full proof: one judged score, 0 when the proof does not check. Step proof:
/// each checked step judged, failed steps 0, averaged over all steps.
BaselineScore score_baseline(const BaselineRun& run, const std::string& problem_id, Provider& judge,
                             const PromptLibrary& prompts, const RetryPolicy& policy,
                             double minor_weight = kDefaultMinorWeight);

}  // namespace proofflow
