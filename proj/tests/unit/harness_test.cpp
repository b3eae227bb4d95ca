#include "oracles.hpp"
#include "test_support.hpp"

#include "proofflow/error.hpp"
#include "proofflow/report.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace proofflow;
namespace fs = std::filesystem;
namespace t = proofflow::testing;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> fixture_flags(const std::string& providers = "providers.json") {
    return {"--providers",  (t::fixtures_dir() / providers).string(), "--mock-verifier", "--mock-rules",
            (t::fixtures_dir() / "mock_verifier.json").string(), "--clock", "simulated"};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

BenchConfig simulated(Strategy s) {
    BenchConfig c;
    c.strategy = s;
    c.clock = ClockMode::Simulated;
    c.prefix_k = {1, 3};
    return c;
}

std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

// One benchmark run per strategy, shared by the tests of a process.
const fs::path& bench_run(Strategy s) {
    static std::map<Strategy, std::unique_ptr<t::TempDir>> dirs;
    auto& slot = dirs[s];
    if (!slot) {
        slot = std::make_unique<t::TempDir>("pf-bench");
        run_benchmark(load_dataset(t::dataset_dir()), slot->path(), simulated(s), t::fixture_backends());
    }
    return slot->path();
}

}  // namespace

TEST(Dataset, LoadsBundledProblemsSorted) {
    const auto problems = load_dataset(t::dataset_dir());
    ASSERT_EQ(problems.size(), 3u);
    EXPECT_EQ(problems[0].id, "dummy_6");
    EXPECT_EQ(problems[2].id, "dummy_9");
    for (const auto& p : problems) {
        EXPECT_FALSE(p.truth_graphs.empty());
        EXPECT_FALSE(p.proof_steps.empty());
        EXPECT_EQ(problem_from_json(problem_to_json(p), "x"), p);
    }
    const DatasetStats s = dataset_stats(problems);
    EXPECT_EQ(s.problems, 3);
    EXPECT_GT(s.mean_nodes, 0.0);
}

TEST(Dataset, EmptyAndMissingDirectories) {
    t::TempDir dir("pf-ds");
    EXPECT_TRUE(load_dataset(dir.path()).empty());
    EXPECT_THROW(load_dataset(dir / "nope"), ParseError);
}

TEST(Dataset, SchemaErrorsNameTheFile) {
    t::TempDir dir("pf-ds-bad");
    Json j = problem_to_json(load_dataset(t::dataset_dir()).front());
    j.erase("area");
    t::write_file(dir / "broken.json", j.dump());
    try {
        load_dataset(dir.path());
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("broken.json"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("area"), std::string::npos) << e.what();
    }
}

TEST(Strategy, ParsesAliases) {
    EXPECT_EQ(strategy_from_string("dag"), Strategy::DagStrict);
    EXPECT_EQ(strategy_from_string("AllPrevious"), Strategy::AllPrevious);
    EXPECT_EQ(strategy_from_string("full_proof"), Strategy::FullProof);
    EXPECT_EQ(strategy_from_string("step"), Strategy::StepProof);
    EXPECT_FALSE(strategy_from_string("random").has_value());
}

TEST(BenchHarness, DagRowOnFixtures) {
    const auto rows = compute_run_metrics(bench_run(Strategy::DagStrict));
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(csv_lines(metrics_csv(rows))[1], "dag,standard,5,3,24,1.000,0.947,0.924,0.667,0.819,2.373");
}

TEST(BenchHarness, StrategyRowsOnFixtures) {
    const auto nodag = compute_run_metrics(bench_run(Strategy::AllPrevious));
    EXPECT_NEAR(nodag[0].proofscore, 0.757, 5e-4);

    const auto full = csv_lines(metrics_csv(compute_run_metrics(bench_run(Strategy::FullProof))));
    EXPECT_EQ(full[1].rfind("full,standard,5,3,/,/,/,", 0), 0u) << full[1];

    const auto step = csv_lines(metrics_csv(compute_run_metrics(bench_run(Strategy::StepProof))));
    EXPECT_EQ(step[1].rfind("step,standard,5,3,18,/,0.333,0.321,0.000,", 0), 0u) << step[1];
}

TEST(BenchHarness, PassAtKIsMonotone) {
    for (Strategy s : {Strategy::DagStrict, Strategy::AllPrevious, Strategy::FullProof, Strategy::StepProof}) {
        const auto rows = compute_run_metrics(bench_run(s));
        ASSERT_EQ(rows.size(), 3u);
        EXPECT_EQ(rows[0].pass_k, 5);
        EXPECT_EQ(rows[1].pass_k, 1);
        EXPECT_EQ(rows[2].pass_k, 3);
        const RunMetrics* by_k[] = {&rows[1], &rows[2], &rows[0]};
        for (int i = 0; i + 1 < 3; ++i) {
            EXPECT_LE(by_k[i]->proofscore, by_k[i + 1]->proofscore + 1e-12);
            EXPECT_LE(by_k[i]->correct_syntax, by_k[i + 1]->correct_syntax + 1e-12);
            if (by_k[i]->tactic_accuracy && by_k[i + 1]->tactic_accuracy)
                EXPECT_LE(*by_k[i]->tactic_accuracy, *by_k[i + 1]->tactic_accuracy + 1e-12);
            if (by_k[i]->formalizer_accuracy && by_k[i + 1]->formalizer_accuracy)
                EXPECT_LE(*by_k[i]->formalizer_accuracy, *by_k[i + 1]->formalizer_accuracy + 1e-12);
        }
        EXPECT_FALSE(rows[1].time_minutes.has_value());
        EXPECT_TRUE(rows[0].time_minutes.has_value());
    }
}

TEST(BenchHarness, MetricsMatchIndependentRecount) {
    for (Strategy s : {Strategy::DagStrict, Strategy::AllPrevious, Strategy::FullProof, Strategy::StepProof}) {
        const auto rows = compute_run_metrics(bench_run(s));
        const auto expected = oracle::recount_run(bench_run(s));
        ASSERT_EQ(rows.size(), expected.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            EXPECT_NEAR(rows[i].proofscore, expected[i].proofscore, 1e-9);
            EXPECT_NEAR(rows[i].correct_syntax, expected[i].correct_syntax, 1e-9);
        }
    }
}

TEST(BenchHarness, TablesCsvAndJsonMirror) {
    const fs::path run = bench_run(Strategy::FullProof);
    const auto lines = csv_lines(t::read_file(run / "tables.csv"));
    const Json json = Json::parse(t::read_file(run / "tables.json"));
    ASSERT_EQ(json.size() + 1, lines.size());
    for (std::size_t r = 0; r < json.size(); ++r) {
        std::vector<std::string> cells;
        std::istringstream in(lines[r + 1]);
        for (std::string c; std::getline(in, c, ',');) cells.push_back(c);
        ASSERT_EQ(cells.size(), json[r].size());
        std::size_t i = 0;
        for (const auto& [key, value] : json[r].items()) {
            const std::string& cell = cells[i++];
            if (cell == "/") {
                EXPECT_TRUE(value.is_null()) << key;
            } else if (value.is_number()) {
                EXPECT_NEAR(value.get<double>(), std::stod(cell), 1e-12) << key;
            } else {
                EXPECT_EQ(value.get<std::string>(), cell) << key;
            }
        }
    }
}

TEST(BenchHarness, ResumeSkipsCompletedProblems) {
    t::TempDir dir("pf-resume");
    const auto problems = load_dataset(t::dataset_dir());
    const BenchConfig config = simulated(Strategy::FullProof);
    run_benchmark(problems, dir.path(), config, t::fixture_backends());
    const auto before = t::snapshot_tree(dir.path());
    const BenchResult again = run_benchmark(problems, dir.path(), config, t::fixture_backends());
    for (const auto& p : again.problems) EXPECT_TRUE(p.skipped) << p.id;
    EXPECT_EQ(t::snapshot_tree(dir.path()), before);
}

TEST(BenchHarness, CrashIsRecordedAndRunContinues) {
    t::TempDir dir("pf-crash");
    Backends backends = t::fixture_backends();
    backends.verifier = std::make_shared<UnavailableVerifier>();
    const BenchResult r =
        run_benchmark(load_dataset(t::dataset_dir()), dir.path(), simulated(Strategy::DagStrict), backends);
    ASSERT_EQ(r.problems.size(), 3u);
    for (const auto& p : r.problems) {
        EXPECT_EQ(p.status.state, "failed");
        EXPECT_EQ(p.status.error_kind, "backend");
    }
    EXPECT_EQ(r.metrics[0].problems, 3);
    EXPECT_EQ(r.metrics[0].proofscore, 0.0);
    EXPECT_TRUE(fs::exists(dir / "dummy_6" / "graph.json"));
}

TEST(BenchHarness, RescoreFromDiskIsStable) {
    t::TempDir dir("pf-rescore");
    const BenchResult r =
        run_benchmark(load_dataset(t::dataset_dir()), dir.path(), simulated(Strategy::DagStrict), t::fixture_backends());
    const auto before = t::snapshot_tree(dir.path());
    EXPECT_EQ(rescore_run(dir.path(), nullptr, PromptLibrary::builtin()), r.metrics);
    EXPECT_EQ(t::snapshot_tree(dir.path()), before);
}

TEST(Cli, RunIsDeterministic) {
    t::TempDir dir("pf-cli");
    for (const char* name : {"a", "b"}) {
        const auto res = cli(concat({"run", (t::dataset_dir() / "dummy_7.json").string(), "--out", (dir / name).string()},
                                    fixture_flags()));
        ASSERT_EQ(res.code, 0) << res.err;
        EXPECT_NE(res.out.find("ProofScore"), std::string::npos);
    }
    EXPECT_TRUE(t::diff_trees(dir / "a", dir / "b").empty());
}

TEST(Cli, ConfigErrorsExitTwo) {
    t::TempDir dir("pf-cli-cfg");
    EXPECT_EQ(cli({"run", "--theorem", "t", "--proof", "p", "--out", dir.path().string()}).code, kExitConfig);
    EXPECT_EQ(cli(concat({"run", (dir / "missing.json").string(), "--out", dir.path().string()}, fixture_flags())).code,
              kExitConfig);
    EXPECT_EQ(cli(concat({"bench", t::dataset_dir().string(), "--strategy", "bogus"}, fixture_flags())).code,
              kExitConfig);
}

TEST(Cli, UnavailableVerifierExitsThreeAfterGraph) {
    t::TempDir dir("pf-cli-noverifier");
    ::unsetenv("PROOFFLOW_VERIFIER_URL");
    const auto res = cli({"run", (t::dataset_dir() / "dummy_6.json").string(), "--providers",
                          (t::fixtures_dir() / "providers.json").string(), "--out", dir.path().string()});
    EXPECT_EQ(res.code, kExitBackend) << res.err;
    EXPECT_TRUE(fs::exists(dir / "dummy_6" / "graph.json"));
}

TEST(Cli, BenchPrintsSlashCellsAndScoreIsIdempotent) {
    t::TempDir dir("pf-cli-bench");
    const auto res = cli(concat({"bench", t::dataset_dir().string(), "--strategy", "full", "--run-dir",
                                 (dir / "run").string()},
                                fixture_flags()));
    ASSERT_EQ(res.code, 0) << res.err;
    EXPECT_NE(res.out.find("full,standard,5,3,/,/,/,"), std::string::npos) << res.out;

    const auto first = cli({"score", (dir / "run").string()});
    ASSERT_EQ(first.code, 0) << first.err;
    const auto snap = t::snapshot_tree(dir / "run");
    const auto second = cli({"score", (dir / "run").string()});
    EXPECT_EQ(second.out, first.out);
    EXPECT_EQ(t::snapshot_tree(dir / "run"), snap);
}

TEST(Cli, TraceWritesTranscriptsWithoutSecrets) {
    t::TempDir dir("pf-cli-trace");
    ::setenv("PF_FIXTURE_SECRET", "sk-do-not-leak", 1);
    const auto res = cli(concat({"run", (t::dataset_dir() / "dummy_6.json").string(), "--strategy", "full", "--trace",
                                 "--out", dir.path().string()},
                                fixture_flags()));
    ASSERT_EQ(res.code, 0) << res.err;
    ASSERT_TRUE(fs::exists(dir / "trace"));
    int files = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir / "trace")) {
        if (!e.is_regular_file()) continue;
        ++files;
        EXPECT_EQ(t::read_file(e.path()).find("sk-do-not-leak"), std::string::npos);
    }
    EXPECT_GT(files, 0);
}

TEST(Report, PayloadRoundTripsThroughHtml) {
    t::TempDir dir("pf-report");
    const auto res = cli(concat({"run", (t::dataset_dir() / "dummy_9.json").string(), "--out", dir.path().string()},
                                fixture_flags()));
    ASSERT_EQ(res.code, 0) << res.err;
    const fs::path problem = dir / "dummy_9";
    const std::string html = t::read_file(problem / "report.html");
    EXPECT_NE(html.find("id=\"proofflow-payload\""), std::string::npos);
    const Json payload = extract_payload(html);
    EXPECT_EQ(payload.at("problem"), "dummy_9");
    EXPECT_EQ(payload.at("per_node").at("L4").at("error_source"), "Formalizer");
    EXPECT_EQ(extract_payload(render_report_html(payload)), payload);

    const std::string before = html;
    write_report(problem);
    EXPECT_EQ(t::read_file(problem / "report.html"), before);
}

TEST(Fixtures, RecordedMatchesScriptedGenerator) {
    t::TempDir dir("pf-drift");
    for (const char* strategy : {"dag", "nodag", "full", "step"}) {
        for (const char* providers : {"providers.json", "scripted_providers.json"}) {
            const auto res = cli(concat({"bench", t::dataset_dir().string(), "--strategy", strategy, "--run-dir",
                                         (dir / providers / strategy).string()},
                                        fixture_flags(providers)));
            ASSERT_EQ(res.code, 0) << strategy << " " << providers << ": " << res.err;
        }
        const auto diff = t::diff_trees(dir / "providers.json" / strategy, dir / "scripted_providers.json" / strategy,
                                        {"manifest.json"});
        EXPECT_TRUE(diff.empty()) << strategy << ": " << (diff.empty() ? "" : diff.front());
    }
}
