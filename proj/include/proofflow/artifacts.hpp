#pragma once

#include "proofflow/baselines.hpp"
#include "proofflow/dataset.hpp"
#include "proofflow/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

// Per-problem artifact files. Every file is written with a stable key order
// and no absolute paths, so two identical runs give byte-identical trees.
namespace proofflow::artifacts {

inline constexpr const char* kProblemFile = "problem.json";
inline constexpr const char* kGraphFile = "graph.json";
inline constexpr const char* kFaithfulnessFile = "faithfulness.json";
inline constexpr const char* kBaselineFile = "baseline.json";
inline constexpr const char* kScoreFile = "score.json";
inline constexpr const char* kTimingFile = "timing.json";
inline constexpr const char* kStatusFile = "status.json";
inline constexpr const char* kReportFile = "report.html";

std::string formal_file(const std::string& node_id);  // {id}.formal.json
std::string proof_file(const std::string& node_id);   // {id}.proof.json

void write_problem(const std::filesystem::path& dir, const BenchmarkProblem& problem);
BenchmarkProblem read_problem(const std::filesystem::path& dir);

void write_pipeline(const std::filesystem::path& dir, const PipelineRecord& record);
PipelineRecord read_pipeline(const std::filesystem::path& dir);

void write_baseline(const std::filesystem::path& dir, const BaselineRun& run,
                    const std::vector<FaithfulnessRecord>& records);
BaselineRun read_baseline(const std::filesystem::path& dir);
std::vector<FaithfulnessRecord> read_baseline_faithfulness(const std::filesystem::path& dir);

void write_score(const std::filesystem::path& dir, const ScoreReport& report);
std::optional<ScoreReport> read_score(const std::filesystem::path& dir);

struct Timing {
    /// "system" or "simulated"
    std::string clock;
    std::int64_t wall_ms = 0;
};
void write_timing(const std::filesystem::path& dir, const Timing& timing);
std::optional<Timing> read_timing(const std::filesystem::path& dir);

struct Status {
    /// "complete" or "failed"
    std::string state;
    /// "", "backend", "config" or "other"
    std::string error_kind;
    std::string error;
};
void write_status(const std::filesystem::path& dir, const Status& status);
std::optional<Status> read_status(const std::filesystem::path& dir);

/// Every exchange recorded under `dir` (graph, nodes, judges, baselines).
std::vector<ChatExchange> recorded_exchanges(const std::filesystem::path& dir);

/// Verifier time recorded under `dir`.
std::int64_t recorded_verifier_ms(const std::filesystem::path& dir);

}  // namespace proofflow::artifacts
