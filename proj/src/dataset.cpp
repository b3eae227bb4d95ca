#include "proofflow/dataset.hpp"

#include "proofflow/error.hpp"

#include <algorithm>

namespace proofflow {

Json problem_to_json(const BenchmarkProblem& problem) {
    Json graphs = Json::array();
    for (const auto& g : problem.truth_graphs) graphs.push_back(graph_to_json(g));
    return {{"id", problem.id},
            {"area", problem.area},
            {"theorem_nl", problem.theorem_nl},
            {"proof_nl", problem.proof_nl},
            {"proof_steps", problem.proof_steps},
            {"truth_graphs", std::move(graphs)}};
}

namespace {

const Json& field(const Json& json, const char* key, const std::string& where) {
    if (!json.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
    return json.at(key);
}

std::string string_field(const Json& json, const char* key, const std::string& where) {
    const Json& value = field(json, key, where);
    if (!value.is_string()) throw ParseError(where + ": field '" + key + "' must be a string");
    return value.get<std::string>();
}

}  // namespace

BenchmarkProblem problem_from_json(const Json& json, const std::string& where, bool require_truth) {
    if (!json.is_object()) throw ParseError(where + ": expected a JSON object");
    static const std::array<const char*, 6> keys = {"id", "area", "theorem_nl", "proof_nl", "proof_steps",
                                                    "truth_graphs"};
    for (const auto& item : json.items())
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return item.key() == k; }))
            throw ParseError(where + ": unknown field '" + item.key() + "'");

    BenchmarkProblem problem;
    problem.id = string_field(json, "id", where);
    problem.area = string_field(json, "area", where);
    problem.theorem_nl = string_field(json, "theorem_nl", where);
    problem.proof_nl = string_field(json, "proof_nl", where);
    if (problem.id.empty()) throw ParseError(where + ": field 'id' must not be empty");
    const bool known_area = std::find(kAreas.begin(), kAreas.end(), problem.area) != kAreas.end();
    if (!known_area && (require_truth || !problem.area.empty()))
        throw ParseError(where + ": field 'area' has invalid value \"" + problem.area + "\"");

    const Json& steps = field(json, "proof_steps", where);
    if (!steps.is_array()) throw ParseError(where + ": field 'proof_steps' must be an array");
    for (const auto& s : steps) {
        if (!s.is_string()) throw ParseError(where + ": field 'proof_steps' must contain only strings");
        problem.proof_steps.push_back(s.get<std::string>());
    }

    const Json& graphs = field(json, "truth_graphs", where);
    if (!graphs.is_array()) throw ParseError(where + ": field 'truth_graphs' must be an array");
    if (require_truth && graphs.empty()) throw ParseError(where + ": field 'truth_graphs' must not be empty");
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        const std::string graph_where = where + ": truth_graphs[" + std::to_string(i) + "]";
        ProofGraph g;
        try {
            g = graph_from_json(graphs[i]);
        } catch (const ParseError& e) {
            throw ParseError(graph_where + ": " + e.what());
        }
        const auto violations = validate_graph(g);
        if (!violations.empty()) throw ParseError(graph_where + ": invalid graph: " + violations.front().message);
        problem.truth_graphs.push_back(std::move(g));
    }
    return problem;
}

std::vector<BenchmarkProblem> load_dataset(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ParseError("dataset directory not found: " + dir.string());
    std::vector<BenchmarkProblem> problems;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        const std::string where = entry.path().filename().string();
        Json json;
        try {
            json = Json::parse(read_text_file(entry.path()));
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(where + ": " + e.what());
        }
        problems.push_back(problem_from_json(json, where));
    }
    std::sort(problems.begin(), problems.end(),
              [](const BenchmarkProblem& a, const BenchmarkProblem& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < problems.size(); ++i)
        if (problems[i].id == problems[i - 1].id) throw ParseError("duplicate problem id '" + problems[i].id + "'");
    return problems;
}

DatasetStats dataset_stats(const std::vector<BenchmarkProblem>& problems) {
    DatasetStats stats;
    stats.problems = static_cast<int>(problems.size());
    if (problems.empty()) return stats;
    double nodes = 0;
    std::array<double, 4> kinds{};
    for (const auto& p : problems) {
        const ProofGraph& g = p.truth_graphs.front();
        nodes += static_cast<double>(g.nodes.size());
        for (const auto& n : g.nodes) kinds[static_cast<std::size_t>(n.kind)] += 1;
    }
    const auto count = static_cast<double>(problems.size());
    stats.mean_nodes = nodes / count;
    for (std::size_t i = 0; i < kinds.size(); ++i) stats.mean_kind_counts[i] = kinds[i] / count;
    return stats;
}

}  // namespace proofflow
