#pragma once

#include "proofflow/json.hpp"
#include "proofflow/proof_graph.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace proofflow {

inline constexpr std::array<std::string_view, 6> kAreas = {
    "number_theory_algebra", "real_analysis",    "inequality",
    "probability_set_theory", "complex_analysis", "sequences_series",
};

struct BenchmarkProblem {
    std::string id;
    std::string area;
    std::string theorem_nl;
    std::string proof_nl;
    std::vector<std::string> proof_steps;
    std::vector<ProofGraph> truth_graphs;

    bool operator==(const BenchmarkProblem&) const = default;
};

/// {"id", "area", "theorem_nl", "proof_nl", "proof_steps", "truth_graphs"}
Json problem_to_json(const BenchmarkProblem& problem);

/// Strict: all keys required, no others, area from kAreas, every truth graph
/// valid. `require_truth` additionally demands at least one truth graph and
/// a non-empty area. Errors name `where` and the field.
BenchmarkProblem problem_from_json(const Json& json, const std::string& where, bool require_truth = true);

/// Every *.json file of `dir`, sorted by problem id. A missing directory is a
/// ParseError; an empty one yields an empty list.
std::vector<BenchmarkProblem> load_dataset(const std::filesystem::path& dir);

struct DatasetStats {
    int problems = 0;
    double mean_nodes = 0.0;
    /// TC, D, L, TS
    std::array<double, 4> mean_kind_counts{};
};

/// Node statistics over the first truth graph of each problem.
DatasetStats dataset_stats(const std::vector<BenchmarkProblem>& problems);

}  // namespace proofflow
