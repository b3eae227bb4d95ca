#pragma once

#include "proofflow/artifacts.hpp"
#include "proofflow/dataset.hpp"
#include "proofflow/error_analysis.hpp"
#include "proofflow/pipeline.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace proofflow {

inline constexpr const char* kToolVersion = "0.1.0";

enum class Strategy { DagStrict, AllPrevious, FullProof, StepProof };

/// "dag", "nodag", "full", "step"
std::string_view strategy_id(Strategy strategy);
/// Accepts the short ids plus DagStrict/AllPrevious/FullProof/StepProof and full_proof/step_proof.
std::optional<Strategy> strategy_from_string(std::string_view text);
inline bool is_pipeline(Strategy s) { return s == Strategy::DagStrict || s == Strategy::AllPrevious; }
PremiseMode premise_mode(Strategy strategy);

enum class ClockMode {
    System,
    /// Time advances only by recorded provider latency and checker time;
    /// run directories are stamped with the epoch. Makes runs reproducible.
    Simulated,
};

struct RunMetrics {
    std::string strategy;
    std::string mode;
    bool thinking = false;
    int pass_k = 5;
    int problems = 0;
    /// Unset where the strategy has no step-level notion (rendered "/").
    std::optional<int> total_steps;
    std::optional<double> formalizer_accuracy;
    std::optional<double> tactic_accuracy;
    double proofscore = 0.0;
    double correct_syntax = 0.0;
    std::optional<double> time_minutes;
    std::optional<double> output_tokens_k;

    bool operator==(const RunMetrics&) const = default;
};

Json metrics_to_json(const RunMetrics& metrics);
RunMetrics metrics_from_json(const Json& json);

/// One problem's contribution to the run metrics, read back from its artifacts.
struct ProblemSummary {
    std::string id;
    bool crashed = false;
    int steps = 0;
    int formal_ok = 0;
    int provable = 0;
    int tactic_ok = 0;
    double proofscore = 0.0;
    bool correct_syntax = false;
    std::int64_t wall_ms = 0;
    std::int64_t output_tokens = 0;
    std::vector<ErrorSource> error_sources;
};

/// Reads a problem directory as if only the first `k` attempts of every
/// stage had been allowed.
ProblemSummary summarize_problem(const std::filesystem::path& dir, Strategy strategy, int k);

/// `prefix` rows leave time and tokens unset: those were only measured for the full budget.
RunMetrics aggregate_metrics(const std::vector<ProblemSummary>& summaries, Strategy strategy, bool thinking,
                             int pass_k, bool prefix);

struct Manifest {
    std::string tool_version;
    Strategy strategy = Strategy::DagStrict;
    int pass_k = 5;
    std::vector<int> prefix_k;
    bool thinking = false;
    std::string clock = "system";
    std::string created;
    std::string prompts_version;
    Json providers = Json::object();
    std::string verifier;
    double minor_weight = kDefaultMinorWeight;
    double threshold = kFaithfulnessThreshold;
    bool score_provable_only = false;
    std::vector<std::string> problems;
};

Json manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(const Json& json);
Manifest read_manifest(const std::filesystem::path& run_dir);

/// Metrics rows of a finished run: the full budget first, then each prefix k.
std::vector<RunMetrics> compute_run_metrics(const std::filesystem::path& run_dir);

/// Step-outcome table of a pipeline run (empty label for baselines is not produced).
std::optional<ErrorTable> run_error_table(const std::filesystem::path& run_dir);

/// Header "strategy,thinking,k,problems,total_steps,form_accuracy,tactic_accuracy,
/// proofscore,correct_syntax,time_mins,output_tokens_k"; numbers with three
/// decimals, "/" for unset cells.
std::string metrics_csv(const std::vector<RunMetrics>& rows);
/// Mirrors the CSV cell for cell: numbers parsed back from the CSV text, null for "/".
Json metrics_table_json(const std::vector<RunMetrics>& rows);

/// Writes tables.csv/json and errors.csv/json for the given runs into `out_dir`.
void emit_tables(const std::vector<std::filesystem::path>& run_dirs, const std::filesystem::path& out_dir);

struct BenchConfig {
    Strategy strategy = Strategy::DagStrict;
    PipelineOptions options;
    ClockMode clock = ClockMode::System;
    int jobs = 1;
    bool force = false;
    std::vector<int> prefix_k;
    /// Recorded in the manifest only.
    bool thinking = false;
    Json providers = Json::object();
    std::string verifier;
};

std::string run_timestamp(ClockMode clock);
std::filesystem::path run_directory(const std::filesystem::path& out, ClockMode clock, Strategy strategy);

/// Runs one problem into `dir`, replacing whatever was there. Never throws
/// for pipeline failures: they end up in the returned status.
artifacts::Status run_problem(const BenchmarkProblem& problem, const std::filesystem::path& dir,
                              const BenchConfig& config, const Backends& backends);

struct ProblemRun {
    std::string id;
    artifacts::Status status;
    /// Already complete and left alone (resume).
    bool skipped = false;
};

struct BenchResult {
    std::filesystem::path run_dir;
    std::vector<ProblemRun> problems;
    std::vector<RunMetrics> metrics;
};

/// Runs every problem (up to config.jobs at once), skipping complete ones
/// unless config.force, then writes manifest.json, metrics.json and tables.
BenchResult run_benchmark(const std::vector<BenchmarkProblem>& problems, const std::filesystem::path& run_dir,
                          const BenchConfig& config, const Backends& backends);

/// Recomputes score.json (and report.html) of one problem from its artifacts.
/// Faithfulness records are reused; missing ones are judged with `judge`
/// when given.
void rescore_problem(const std::filesystem::path& dir, Strategy strategy, const PipelineOptions& options,
                     Provider* judge);

/// Rescores every complete problem of a run and rewrites metrics and tables.
std::vector<RunMetrics> rescore_run(const std::filesystem::path& run_dir, Provider* judge,
                                    const PromptLibrary& prompts);

}  // namespace proofflow
