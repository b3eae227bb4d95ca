#include "proofflow/pipeline.hpp"

#include "proofflow/error.hpp"

namespace proofflow {

namespace {

void require(const std::shared_ptr<Provider>& p, const char* stage) {
    if (!p) throw ConfigError(std::string("no provider configured for stage '") + stage + "'");
}

std::string nl_dependencies(const ProofGraph& graph, const ProofNode& node) {
    if (node.deps.empty()) return "(none)";
    std::string out;
    for (const auto& dep : node.deps) {
        const ProofNode* d = graph.find(dep);
        out += (out.empty() ? "" : "\n") + dep + ": " + (d ? d->nl_self_contained : std::string("?"));
    }
    return out;
}

}  // namespace

PipelineRecord run_pipeline(const std::string& theorem_nl, const std::string& proof_nl, PremiseMode mode,
                            bool has_truth, const Backends& backends, const PipelineOptions& options,
                            const std::function<void(const PipelineRecord&)>& on_graph) {
    require(backends.graph_builder, "graph_builder");
    require(backends.formalizer, "formalizer");
    require(backends.tactic, "tactic");
    require(backends.judge, "judge");
    if (!backends.verifier) throw ConfigError("no verifier configured");

    const StageOptions& stage = options.stage;
    PipelineRecord record;
    record.mode = mode;
    record.build = build_graph(theorem_nl, proof_nl, *backends.graph_builder, stage.prompts, stage.policy);
    if (on_graph) on_graph(record);
    if (!record.build.passed) return record;
    const ProofGraph& graph = record.build.graph;

    record.formal = formalize_graph(graph, mode, *backends.formalizer, *backends.verifier, stage);

    for (const auto& node : graph.nodes) {
        if (!is_provable(node.kind)) continue;
        const FormalizedNode& fnode = record.formal.at(node.id);
        CompletedNode completed;
        completed.node_id = node.id;
        if (fnode.c_formalizer) completed = complete_tactics(fnode, *backends.tactic, *backends.verifier, stage);
        record.completed.emplace(node.id, std::move(completed));
    }

    for (const auto& node : graph.nodes) {
        const FormalizedNode& fnode = record.formal.at(node.id);
        record.faithfulness.emplace(
            node.id, score_faithfulness(node.id, node.nl_self_contained, fnode.statement, fnode.c_formalizer,
                                        *backends.judge, stage.prompts, stage.policy, options.minor_weight));
    }

    for (auto& [id, completed] : record.completed) {
        const FormalizedNode& fnode = record.formal.at(id);
        const double f = record.faithfulness.at(id).f;
        if (fnode.c_formalizer && !completed.c_tactic && f >= options.threshold)
            attach_negation(completed, fnode, *backends.tactic, *backends.verifier, stage);
    }

    if (mode != PremiseMode::DagStrict && !has_truth) {
        for (const auto& node : graph.nodes) {
            if (node.kind == NodeKind::TheoremCondition) continue;
            const FormalizedNode& fnode = record.formal.at(node.id);
            const auto completed = record.completed.find(node.id);
            const bool c = completed != record.completed.end() ? completed->second.c_tactic : fnode.c_formalizer;
            if (!c) continue;
            const std::string& source =
                completed != record.completed.end() ? completed->second.proof_source : formal_body(fnode);
            record.structure.emplace(node.id, judge_structure(node.id, node.nl_self_contained,
                                                              nl_dependencies(graph, node), source, *backends.judge,
                                                              stage.prompts, stage.policy));
        }
    }
    return record;
}

ProofGraph estimated_graph(const PipelineRecord& record) {
    ProofGraph est = record.build.graph;
    for (auto& node : est.nodes) {
        auto it = record.formal.find(node.id);
        node.deps = it == record.formal.end() ? std::vector<std::string>{} : it->second.premises_used;
    }
    return est;
}

ScoreReport pipeline_score_report(const PipelineRecord& record, const std::string& problem_id,
                                  const std::vector<ProofGraph>& truths, const PipelineOptions& options) {
    ScoreReport report;
    report.problem = problem_id;
    report.mode = std::string(to_string(record.mode));
    if (!record.build.passed) {
        if (!truths.empty()) {
            for (const auto& node : truths.front().nodes)
                if (!options.score_provable_only || is_provable(node.kind)) ++report.n;
        }
        return report;
    }

    const ProofGraph& graph = record.build.graph;
    std::map<std::string, MatchOutcome> matches;
    if (record.mode != PremiseMode::DagStrict && !truths.empty())
        matches = match_dependencies(estimated_graph(record), truths);

    std::map<std::string, double> f;
    std::map<std::string, bool> c, structural;
    for (const auto& node : graph.nodes) {
        if (options.score_provable_only && !is_provable(node.kind)) continue;
        const FormalizedNode& fnode = record.formal.at(node.id);
        const auto faith = record.faithfulness.find(node.id);
        if (faith == record.faithfulness.end())
            throw ParseError("problem '" + problem_id + "': no faithfulness record for node '" + node.id + "'");

        NodeScore score;
        score.id = node.id;
        score.f = faith->second.f;
        bool tactic_ok = false, negation_proved = false;
        if (is_provable(node.kind)) {
            const CompletedNode& completed = record.completed.at(node.id);
            tactic_ok = completed.c_tactic;
            negation_proved = completed.negation_proved;
            score.c = tactic_ok;
        } else {
            score.c = fnode.c_formalizer;
        }

        if (record.mode == PremiseMode::DagStrict) {
            score.structural = true;
        } else if (!truths.empty()) {
            score.structural = is_match(matches.at(node.id));
        } else if (node.kind == NodeKind::TheoremCondition) {
            score.structural = true;
        } else {
            auto verdict = record.structure.find(node.id);
            score.structural = verdict != record.structure.end() && verdict->second.faithful;
        }

        score.error_source = std::string(
            to_string(classify_node(node.kind, score.f, fnode.c_formalizer, tactic_ok, negation_proved, options.threshold)));
        f[node.id] = score.f;
        c[node.id] = score.c;
        structural[node.id] = score.structural;
        report.nodes.push_back(std::move(score));
    }
    report.n = static_cast<int>(report.nodes.size());
    if (report.n > 0) report.proofscore = proof_score(f, c, structural);
    return report;
}

}  // namespace proofflow
