#include "proofflow/artifacts.hpp"

#include "proofflow/error.hpp"

namespace proofflow::artifacts {

namespace fs = std::filesystem;

std::string formal_file(const std::string& node_id) { return node_id + ".formal.json"; }
std::string proof_file(const std::string& node_id) { return node_id + ".proof.json"; }

namespace {

Json read_required(const fs::path& path) {
    if (!fs::exists(path)) throw ParseError("missing artifact " + path.filename().string());
    return read_json_file(path);
}

}  // namespace

void write_problem(const fs::path& dir, const BenchmarkProblem& problem) {
    write_json_file(dir / kProblemFile, problem_to_json(problem));
}

BenchmarkProblem read_problem(const fs::path& dir) {
    return problem_from_json(read_required(dir / kProblemFile), (dir.filename() / kProblemFile).string(), false);
}

void write_pipeline(const fs::path& dir, const PipelineRecord& record) {
    Json graph = {{"mode", to_string(record.mode)}};
    const Json build = build_result_to_json(record.build);
    for (auto& [key, value] : build.items()) graph[key] = value;
    write_json_file(dir / kGraphFile, graph);
    if (!record.build.passed) return;

    for (const auto& [id, node] : record.formal) write_json_file(dir / formal_file(id), formalized_to_json(node));
    for (const auto& [id, node] : record.completed) write_json_file(dir / proof_file(id), completed_to_json(node));

    Json records = Json::array();
    for (const auto& node : record.build.graph.nodes) {
        auto it = record.faithfulness.find(node.id);
        if (it != record.faithfulness.end()) records.push_back(faithfulness_to_json(it->second));
    }
    Json structure = Json::array();
    for (const auto& node : record.build.graph.nodes) {
        auto it = record.structure.find(node.id);
        if (it == record.structure.end()) continue;
        Json entry = {{"node_id", node.id}};
        const Json verdict = structure_verdict_to_json(it->second);
        for (auto& [key, value] : verdict.items()) entry[key] = value;
        structure.push_back(std::move(entry));
    }
    write_json_file(dir / kFaithfulnessFile, {{"records", std::move(records)}, {"structure", std::move(structure)}});
}

PipelineRecord read_pipeline(const fs::path& dir) {
    const Json graph = read_required(dir / kGraphFile);
    PipelineRecord record;
    try {
        const auto mode_text = graph.at("mode").get<std::string>();
        auto mode = premise_mode_from_string(mode_text);
        if (!mode) throw ParseError("graph.json: invalid mode \"" + mode_text + "\"");
        record.mode = *mode;
        record.build = build_result_from_json(
            {{"passed", graph.at("passed")}, {"graph", graph.at("graph")}, {"violations", graph.at("violations")},
             {"attempts", graph.at("attempts")}});
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("graph.json: ") + e.what());
    }
    if (!record.build.passed) return record;

    for (const auto& node : record.build.graph.nodes) {
        record.formal.emplace(node.id, formalized_from_json(read_required(dir / formal_file(node.id))));
        if (is_provable(node.kind))
            record.completed.emplace(node.id, completed_from_json(read_required(dir / proof_file(node.id))));
    }
    if (fs::exists(dir / kFaithfulnessFile)) {
        const Json faith = read_json_file(dir / kFaithfulnessFile);
        try {
            for (const auto& r : faith.at("records")) {
                auto rec = faithfulness_from_json(r);
                record.faithfulness.emplace(rec.node_id, std::move(rec));
            }
            for (const auto& s : faith.at("structure"))
                record.structure.emplace(s.at("node_id").get<std::string>(), structure_verdict_from_json(s));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("faithfulness.json: ") + e.what());
        }
    }
    return record;
}

void write_baseline(const fs::path& dir, const BaselineRun& run, const std::vector<FaithfulnessRecord>& records) {
    write_json_file(dir / kBaselineFile, baseline_to_json(run));
    Json out = Json::array();
    for (const auto& r : records) out.push_back(faithfulness_to_json(r));
    write_json_file(dir / kFaithfulnessFile, {{"records", std::move(out)}});
}

BaselineRun read_baseline(const fs::path& dir) { return baseline_from_json(read_required(dir / kBaselineFile)); }

std::vector<FaithfulnessRecord> read_baseline_faithfulness(const fs::path& dir) {
    std::vector<FaithfulnessRecord> out;
    if (!fs::exists(dir / kFaithfulnessFile)) return out;
    const Json faith = read_json_file(dir / kFaithfulnessFile);
    for (const auto& r : faith.at("records")) out.push_back(faithfulness_from_json(r));
    return out;
}

void write_score(const fs::path& dir, const ScoreReport& report) {
    write_json_file(dir / kScoreFile, score_report_to_json(report));
}

std::optional<ScoreReport> read_score(const fs::path& dir) {
    if (!fs::exists(dir / kScoreFile)) return std::nullopt;
    return score_report_from_json(read_json_file(dir / kScoreFile));
}

void write_timing(const fs::path& dir, const Timing& timing) {
    write_json_file(dir / kTimingFile, {{"clock", timing.clock}, {"wall_ms", timing.wall_ms}});
}

std::optional<Timing> read_timing(const fs::path& dir) {
    if (!fs::exists(dir / kTimingFile)) return std::nullopt;
    const Json json = read_json_file(dir / kTimingFile);
    return Timing{json.at("clock").get<std::string>(), json.at("wall_ms").get<std::int64_t>()};
}

void write_status(const fs::path& dir, const Status& status) {
    write_json_file(dir / kStatusFile,
                    {{"state", status.state}, {"error_kind", status.error_kind}, {"error", status.error}});
}

std::optional<Status> read_status(const fs::path& dir) {
    if (!fs::exists(dir / kStatusFile)) return std::nullopt;
    const Json json = read_json_file(dir / kStatusFile);
    return Status{json.at("state").get<std::string>(), json.at("error_kind").get<std::string>(),
                  json.at("error").get<std::string>()};
}

std::vector<ChatExchange> recorded_exchanges(const fs::path& dir) {
    std::vector<ChatExchange> out;
    if (fs::exists(dir / kGraphFile)) {
        const PipelineRecord record = read_pipeline(dir);
        out.insert(out.end(), record.build.attempts.begin(), record.build.attempts.end());
        for (const auto& node : record.build.graph.nodes) {
            if (!record.build.passed) break;
            const auto& f = record.formal.at(node.id);
            out.insert(out.end(), f.attempts.begin(), f.attempts.end());
            if (auto c = record.completed.find(node.id); c != record.completed.end()) {
                out.insert(out.end(), c->second.attempts.begin(), c->second.attempts.end());
                out.insert(out.end(), c->second.negation_attempts.begin(), c->second.negation_attempts.end());
            }
            if (auto r = record.faithfulness.find(node.id); r != record.faithfulness.end())
                out.insert(out.end(), r->second.attempts.begin(), r->second.attempts.end());
            if (auto s = record.structure.find(node.id); s != record.structure.end())
                out.insert(out.end(), s->second.attempts.begin(), s->second.attempts.end());
        }
    }
    if (fs::exists(dir / kBaselineFile)) {
        const BaselineRun run = read_baseline(dir);
        for (const auto& e : run.all_attempts()) out.push_back(e);
        for (const auto& r : read_baseline_faithfulness(dir)) out.insert(out.end(), r.attempts.begin(), r.attempts.end());
    }
    return out;
}

std::int64_t recorded_verifier_ms(const fs::path& dir) {
    std::int64_t total = 0;
    if (fs::exists(dir / kGraphFile)) {
        const PipelineRecord record = read_pipeline(dir);
        for (const auto& [id, f] : record.formal) total += f.verifier_ms;
        for (const auto& [id, c] : record.completed) total += c.verifier_ms;
    }
    if (fs::exists(dir / kBaselineFile))
        for (const auto& u : read_baseline(dir).units) total += u.report.elapsed_ms;
    return total;
}

}  // namespace proofflow::artifacts
