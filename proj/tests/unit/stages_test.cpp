#include "test_support.hpp"

#include "proofflow/baselines.hpp"
#include "proofflow/error.hpp"
#include "proofflow/formalizer.hpp"
#include "proofflow/graph_builder.hpp"
#include "proofflow/pipeline.hpp"
#include "proofflow/tactic_completer.hpp"

#include <gtest/gtest.h>

using namespace proofflow;
namespace t = proofflow::testing;

namespace {

const BenchmarkProblem& problem(const std::string& id) {
    static const std::vector<BenchmarkProblem> all = load_dataset(t::dataset_dir());
    for (const auto& p : all)
        if (p.id == id) return p;
    throw std::runtime_error("no problem " + id);
}

PipelineRecord fixture_run(const std::string& id, PremiseMode mode) {
    const auto& p = problem(id);
    return run_pipeline(p.theorem_nl, p.proof_nl, mode, !p.truth_graphs.empty(), t::fixture_backends(),
                        PipelineOptions{});
}

std::string graph_reply(const std::string& nodes) {
    return "Here is the graph.\n```json\n{\"theorem_nl\": \"t\", \"proof_nl\": \"p\", \"nodes\": [" + nodes + "]}\n```";
}

std::string node_json(const std::string& id, const std::string& kind, const std::string& deps) {
    return "{\"id\": \"" + id + "\", \"kind\": \"" + kind + "\", \"nl_original\": \"o\", \"nl_self_contained\": \"s " +
           id + "\", \"deps\": [" + deps + "]}";
}

}  // namespace

TEST(GraphBuilder, ParsesGraphInsideProse) {
    const ProofGraph g = parse_graph_json(graph_reply(node_json("TC1", "TC", "") + "," +
                                                      node_json("TS", "TS", "\"TC1\"")));
    ASSERT_EQ(g.nodes.size(), 2u);
    EXPECT_EQ(g.nodes[1].deps, std::vector<std::string>{"TC1"});
    EXPECT_THROW(parse_graph_json("no graph"), ParseError);
}

TEST(GraphBuilder, IdScheme) {
    ProofGraph g = parse_graph_json(graph_reply(node_json("TC1", "TC", "") + "," + node_json("L1", "L", "\"TC1\"") +
                                                "," + node_json("TS2", "TS", "\"L1\"")));
    EXPECT_TRUE(check_id_scheme(g).empty());
    g.nodes[1].id = "Lemma1";
    g.nodes[0].kind = NodeKind::Definition;
    const auto v = check_id_scheme(g);
    ASSERT_EQ(v.size(), 2u);
    EXPECT_EQ(v[0].code, ViolationCode::InvalidId);
    EXPECT_EQ(v[0].node_ids, std::vector<std::string>{"TC1"});
}

TEST(GraphBuilder, RepairsForwardReferenceFromFeedback) {
    std::vector<ScriptedProvider::Rule> rules(2);
    rules[0].attempt = 1;
    rules[0].response = graph_reply(node_json("TC1", "TC", "") + "," + node_json("L1", "L", "\"L2\"") + "," +
                                    node_json("L2", "L", "\"TC1\"") + "," + node_json("TS", "TS", "\"L1\""));
    rules[1].last_contains = {"ForwardReference"};
    rules[1].response = graph_reply(node_json("TC1", "TC", "") + "," + node_json("L2", "L", "\"TC1\"") + "," +
                                    node_json("L1", "L", "\"L2\"") + "," + node_json("TS", "TS", "\"L1\""));
    ScriptedProvider provider("g", rules);
    const GraphBuildResult r = build_graph("theorem", "proof", provider, PromptLibrary::builtin(), RetryPolicy{});
    EXPECT_TRUE(r.passed);
    EXPECT_EQ(r.attempts.size(), 2u);
    EXPECT_TRUE(r.violations.empty());
    EXPECT_TRUE(validate_graph(r.graph).empty());
    EXPECT_EQ(r.graph.theorem_nl, "theorem");
    EXPECT_EQ(build_result_to_json(build_result_from_json(build_result_to_json(r))), build_result_to_json(r));
}

TEST(GraphBuilder, GivesUpWithParseFailure) {
    std::vector<ScriptedProvider::Rule> rules(1);
    rules[0].response = "I cannot do that.";
    ScriptedProvider provider("g", rules);
    RetryPolicy policy;
    policy.max_attempts = 2;
    const GraphBuildResult r = build_graph("theorem", "proof", provider, PromptLibrary::builtin(), policy);
    EXPECT_FALSE(r.passed);
    EXPECT_EQ(r.attempts.size(), 2u);
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_EQ(r.violations[0].code, ViolationCode::ParseFailure);
    EXPECT_THROW(build_graph(" ", "proof", provider, PromptLibrary::builtin(), policy), ContractViolation);
}

TEST(Formalizer, PermittedPremisesPerMode) {
    const ProofGraph& g = problem("dummy_6").truth_graphs.front();
    EXPECT_EQ(permitted_premises(g, "L6", PremiseMode::DagStrict), (std::vector<std::string>{"L3", "L5"}));
    EXPECT_EQ(permitted_premises(g, "L3", PremiseMode::AllPrevious),
              (std::vector<std::string>{"TC1", "L1", "L2"}));
    EXPECT_TRUE(permitted_premises(g, "TC1", PremiseMode::DagStrict).empty());
    EXPECT_THROW(permitted_premises(g, "L99", PremiseMode::DagStrict), ContractViolation);
}

TEST(Formalizer, PremiseHeadingsRoundTrip) {
    const ProofGraph& g = problem("dummy_6").truth_graphs.front();
    const std::vector<std::string> ids = {"TC1", "L1", "L2"};
    const std::string block = render_premises(ids, {}, g);
    EXPECT_EQ(parse_premise_headings(block), ids);
    EXPECT_NE(block.find("[unverified]"), std::string::npos);
    EXPECT_EQ(render_premises({}, {}, g), "(none)");
}

TEST(Pipeline, Dummy6DagOutcomes) {
    const PipelineRecord r = fixture_run("dummy_6", PremiseMode::DagStrict);
    ASSERT_TRUE(r.build.passed);
    EXPECT_EQ(r.build.graph.nodes.size(), 8u);
    EXPECT_EQ(dependency_sets(r.build.graph).at("L3"), std::set<std::string>{"L2"});
    for (const auto& [id, f] : r.formal) {
        EXPECT_TRUE(f.c_formalizer) << id;
        // DagStrict never uses anything outside the node's deps.
        for (const auto& used : f.premises_used)
            EXPECT_NE(std::find(f.permitted_premises.begin(), f.permitted_premises.end(), used),
                      f.permitted_premises.end());
    }
    EXPECT_EQ(r.formal.at("L5").passed_at_attempt, 2);
    EXPECT_NEAR(r.faithfulness.at("TS").f, 2.0 / 3.0, 1e-12);
    for (const auto& [id, c] : r.completed)
        if (c.c_tactic) EXPECT_FALSE(c.proof_source.empty()) << id;
}

TEST(Pipeline, Dummy7TacticAndNegation) {
    const PipelineRecord dag = fixture_run("dummy_7", PremiseMode::DagStrict);
    const auto& l2 = dag.completed.at("L2");
    EXPECT_FALSE(l2.c_tactic);
    EXPECT_TRUE(l2.negation_attempted);
    EXPECT_FALSE(l2.negation_proved);
    const ScoreReport dag_score = pipeline_score_report(dag, "dummy_7", problem("dummy_7").truth_graphs, {});
    for (const auto& n : dag_score.nodes)
        if (n.id == "L2") EXPECT_EQ(n.error_source, "Tactic");

    const PipelineRecord nodag = fixture_run("dummy_7", PremiseMode::AllPrevious);
    EXPECT_TRUE(nodag.completed.at("L4").negation_proved);
    const ScoreReport score = pipeline_score_report(nodag, "dummy_7", problem("dummy_7").truth_graphs, {});
    for (const auto& n : score.nodes)
        if (n.id == "L4") EXPECT_EQ(n.error_source, "NLStatement");
}

TEST(Pipeline, Dummy9RetriesGraphAndGatesLowFaithfulness) {
    const PipelineRecord r = fixture_run("dummy_9", PremiseMode::DagStrict);
    EXPECT_TRUE(r.build.passed);
    EXPECT_EQ(r.build.attempts.size(), 2u);
    EXPECT_DOUBLE_EQ(r.faithfulness.at("L4").f, 0.5);
    const ScoreReport score = pipeline_score_report(r, "dummy_9", problem("dummy_9").truth_graphs, {});
    for (const auto& n : score.nodes)
        if (n.id == "L4") EXPECT_EQ(n.error_source, "Formalizer");
}

TEST(Pipeline, NoDagStructuralMismatchLowersProofScore) {
    const auto& p = problem("dummy_6");
    const PipelineRecord r = fixture_run("dummy_6", PremiseMode::AllPrevious);
    const ScoreReport s = pipeline_score_report(r, p.id, p.truth_graphs, {});
    EXPECT_EQ(s.n, 8);
    for (const auto& n : s.nodes)
        if (n.id == "L3") EXPECT_FALSE(n.structural);
    EXPECT_NEAR(s.proofscore, 5.0 / 6.0, 1e-12);

    double expect = 0.0;
    for (const auto& n : s.nodes) expect += n.f * n.c * n.structural;
    EXPECT_NEAR(s.proofscore, expect / s.n, 1e-12);
}

TEST(Pipeline, ScoreProvableOnlyShrinksDenominator) {
    const auto& p = problem("dummy_6");
    const PipelineRecord r = fixture_run("dummy_6", PremiseMode::DagStrict);
    PipelineOptions options;
    options.score_provable_only = true;
    const ScoreReport s = pipeline_score_report(r, p.id, p.truth_graphs, options);
    EXPECT_EQ(s.n, 7);
}

TEST(Pipeline, MissingBackendIsConfigError) {
    Backends b = t::fixture_backends();
    b.judge.reset();
    EXPECT_THROW(run_pipeline("t", "p", PremiseMode::DagStrict, true, b, {}), ConfigError);
}

TEST(TacticCompleter, RequiresFormalizedProvableNode) {
    FormalizedNode f;
    f.node_id = "TC1";
    f.kind = NodeKind::TheoremCondition;
    f.c_formalizer = true;
    ScriptedProvider provider("p", {});
    MockVerifier verifier;
    EXPECT_THROW(complete_tactics(f, provider, verifier, StageOptions{}), ContractViolation);
    f.kind = NodeKind::Lemma;
    f.c_formalizer = false;
    EXPECT_THROW(complete_tactics(f, provider, verifier, StageOptions{}), ContractViolation);
}

TEST(TacticCompleter, PlaceholderIsNeverAccepted) {
    FormalizedNode f;
    f.node_id = "L1";
    f.kind = NodeKind::Lemma;
    f.c_formalizer = true;
    f.statement = "theorem L1 (n : ℕ) : n + 0 = n := by\n  sorry";
    std::vector<ScriptedProvider::Rule> rules(1);
    rules[0].response = "theorem L1 (n : ℕ) : n + 0 = n := by\n  sorry";
    ScriptedProvider provider("p", rules);
    MockVerifier verifier;
    StageOptions options;
    options.policy.max_attempts = 2;
    const CompletedNode c = complete_tactics(f, provider, verifier, options);
    EXPECT_FALSE(c.c_tactic);
    EXPECT_EQ(c.attempts.size(), 2u);
    EXPECT_TRUE(c.proof_source.empty());
}

TEST(Baselines, StepProofCascade) {
    std::vector<ScriptedProvider::Rule> rules(2);
    rules[0].contains = {"Formalize step 1:"};
    rules[0].response = "theorem s (n : ℕ) (h : 0 < n) : 0 < n * n := by\n  have h1 : 0 < n := h";
    rules[1].contains = {"Formalize step 2:"};
    rules[1].response = "  exact Nat.mul_pos_bogus h1 h1";
    ScriptedProvider provider("p", rules);
    MockVerifier verifier({}, {{"Nat.mul_pos_bogus", Severity::Error, "unknown identifier"}});
    const BaselineRun run = run_step_proof("thm", {"a", "b", "c"}, provider, verifier, StageOptions{});
    ASSERT_EQ(run.units.size(), 3u);
    EXPECT_EQ(run.units[0].status, StepStatus::Passed);
    EXPECT_EQ(run.units[1].status, StepStatus::Failed);
    EXPECT_EQ(run.units[1].attempts.size(), 5u);
    EXPECT_EQ(run.units[2].status, StepStatus::CascadeFailed);
    EXPECT_TRUE(run.units[2].attempts.empty());
    EXPECT_DOUBLE_EQ(step_accuracy(run), 1.0 / 3.0);
    EXPECT_FALSE(run.proof_level_ok);
    const BaselineRun again = baseline_from_json(baseline_to_json(run));
    EXPECT_EQ(baseline_to_json(again), baseline_to_json(run));
}

TEST(Baselines, StepProofAllPass) {
    std::vector<ScriptedProvider::Rule> rules(2);
    rules[0].contains = {"Formalize step 1:"};
    rules[0].response = "theorem s (n : ℕ) : n = n := by\n  have h : n = n := rfl";
    rules[1].contains = {"Formalize step 2:"};
    rules[1].response = "  rfl";
    ScriptedProvider provider("p", rules);
    MockVerifier verifier;
    const BaselineRun run = run_step_proof("thm", {"a", "b"}, provider, verifier, StageOptions{});
    EXPECT_TRUE(run.proof_level_ok);
    EXPECT_DOUBLE_EQ(step_accuracy(run), 1.0);
    EXPECT_THROW(run_step_proof("thm", {}, provider, verifier, StageOptions{}), ContractViolation);
}

TEST(Baselines, FullProofHasExactlyOneUnit) {
    std::vector<ScriptedProvider::Rule> rules(1);
    rules[0].response = "```lean\ntheorem whole (n : ℕ) : n = n := by\n  rfl\n```";
    ScriptedProvider provider("p", rules);
    MockVerifier verifier;
    const BaselineRun run = run_full_proof("thm", "proof", provider, verifier, StageOptions{});
    ASSERT_EQ(run.units.size(), 1u);
    EXPECT_TRUE(run.proof_level_ok);
    EXPECT_EQ(run.units[0].status, StepStatus::Passed);
    EXPECT_EQ(run.units[0].passed_at_attempt, 1);
}
