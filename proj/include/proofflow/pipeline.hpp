#pragma once

#include "proofflow/error_analysis.hpp"
#include "proofflow/formalizer.hpp"
#include "proofflow/graph_builder.hpp"
#include "proofflow/scoring.hpp"
#include "proofflow/tactic_completer.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace proofflow {

/// One provider per stage plus the checker. Stages may share a provider.
struct Backends {
    std::shared_ptr<Provider> graph_builder;
    std::shared_ptr<Provider> formalizer;
    std::shared_ptr<Provider> tactic;
    std::shared_ptr<Provider> judge;
    std::shared_ptr<Verifier> verifier;
};

struct PipelineOptions {
    StageOptions stage;
    double minor_weight = kDefaultMinorWeight;
    double threshold = kFaithfulnessThreshold;
    /// Average ProofScore over lemmas and theorem solutions only.
    bool score_provable_only = false;
};

/// Everything the graph pipeline produces for one problem.
struct PipelineRecord {
    PremiseMode mode = PremiseMode::DagStrict;
    GraphBuildResult build;
    std::map<std::string, FormalizedNode> formal;
    /// Every provable node; attempts stay empty when its statement failed.
    std::map<std::string, CompletedNode> completed;
    std::map<std::string, FaithfulnessRecord> faithfulness;
    /// Structural judge verdicts, only when no ground truth is available.
    std::map<std::string, StructureVerdict> structure;
};

/// Graph build, formalization, tactic completion, faithfulness judging,
/// negation proving for faithful nodes whose tactics failed, and the
/// structural judge when `has_truth` is false and premises are not DAG-restricted.
/// Stops after the graph stage when the graph never validates. `on_graph`
/// sees the build result before any later stage runs.
PipelineRecord run_pipeline(const std::string& theorem_nl, const std::string& proof_nl, PremiseMode mode,
                            bool has_truth, const Backends& backends, const PipelineOptions& options,
                            const std::function<void(const PipelineRecord&)>& on_graph = {});

/// The built graph with each node's deps replaced by the premises its formal
/// statement actually uses.
ProofGraph estimated_graph(const PipelineRecord& record);

/// Pure assembly of the score report from a record. With a failed graph the
/// report has no nodes, proofscore 0 and n taken from the first truth graph.
ScoreReport pipeline_score_report(const PipelineRecord& record, const std::string& problem_id,
                                  const std::vector<ProofGraph>& truths, const PipelineOptions& options);

}  // namespace proofflow
