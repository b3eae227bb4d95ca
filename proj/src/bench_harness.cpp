#include "proofflow/bench_harness.hpp"

#include "proofflow/error.hpp"
#include "proofflow/report.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <mutex>
#include <sstream>
#include <thread>

namespace proofflow {

namespace fs = std::filesystem;

std::string_view strategy_id(Strategy strategy) {
    switch (strategy) {
    case Strategy::DagStrict: return "dag";
    case Strategy::AllPrevious: return "nodag";
    case Strategy::FullProof: return "full";
    case Strategy::StepProof: return "step";
    }
    return "?";
}

namespace {

std::string_view strategy_mode(Strategy strategy) {
    switch (strategy) {
    case Strategy::DagStrict: return "DagStrict";
    case Strategy::AllPrevious: return "AllPrevious";
    case Strategy::FullProof: return "FullProof";
    case Strategy::StepProof: return "StepProof";
    }
    return "?";
}

}  // namespace

std::optional<Strategy> strategy_from_string(std::string_view text) {
    for (Strategy s : {Strategy::DagStrict, Strategy::AllPrevious, Strategy::FullProof, Strategy::StepProof})
        if (text == strategy_id(s) || text == strategy_mode(s)) return s;
    if (text == "full_proof") return Strategy::FullProof;
    if (text == "step_proof") return Strategy::StepProof;
    return std::nullopt;
}

PremiseMode premise_mode(Strategy strategy) {
    if (strategy == Strategy::DagStrict) return PremiseMode::DagStrict;
    if (strategy == Strategy::AllPrevious) return PremiseMode::AllPrevious;
    throw ContractViolation("baseline strategies have no premise mode");
}

namespace {

template <typename T>
Json optional_json(const std::optional<T>& value) {
    return value ? Json(*value) : Json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const Json& json, const char* key) {
    const Json& v = json.at(key);
    if (v.is_null()) return std::nullopt;
    return v.get<T>();
}

}  // namespace

Json metrics_to_json(const RunMetrics& m) {
    return {{"strategy", m.strategy},
            {"mode", m.mode},
            {"thinking", m.thinking},
            {"pass_k", m.pass_k},
            {"problems", m.problems},
            {"total_steps", optional_json(m.total_steps)},
            {"formalizer_accuracy", optional_json(m.formalizer_accuracy)},
            {"tactic_accuracy", optional_json(m.tactic_accuracy)},
            {"proofscore", m.proofscore},
            {"correct_syntax", m.correct_syntax},
            {"time_minutes", optional_json(m.time_minutes)},
            {"output_tokens_k", optional_json(m.output_tokens_k)}};
}

RunMetrics metrics_from_json(const Json& json) {
    try {
        RunMetrics m;
        m.strategy = json.at("strategy").get<std::string>();
        m.mode = json.at("mode").get<std::string>();
        m.thinking = json.at("thinking").get<bool>();
        m.pass_k = json.at("pass_k").get<int>();
        m.problems = json.at("problems").get<int>();
        m.total_steps = optional_from<int>(json, "total_steps");
        m.formalizer_accuracy = optional_from<double>(json, "formalizer_accuracy");
        m.tactic_accuracy = optional_from<double>(json, "tactic_accuracy");
        m.proofscore = json.at("proofscore").get<double>();
        m.correct_syntax = json.at("correct_syntax").get<double>();
        m.time_minutes = optional_from<double>(json, "time_minutes");
        m.output_tokens_k = optional_from<double>(json, "output_tokens_k");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("metrics: ") + e.what());
    }
}

namespace {

std::int64_t output_tokens(const fs::path& dir) {
    std::int64_t total = 0;
    try {
        for (const auto& e : artifacts::recorded_exchanges(dir)) total += e.completion_tokens;
    } catch (const Error&) {
        // partial artifacts of a crashed problem
    }
    return total;
}

void summarize_pipeline(const fs::path& dir, const BenchmarkProblem& problem, int k, ProblemSummary& out) {
    const PipelineRecord record = artifacts::read_pipeline(dir);
    const bool graph_ok = record.build.passed && static_cast<int>(record.build.attempts.size()) <= k;
    if (!graph_ok) {
        const ProofGraph* counted = !problem.truth_graphs.empty() ? &problem.truth_graphs.front()
                                    : record.build.passed          ? &record.build.graph
                                                                   : nullptr;
        if (counted) {
            for (const auto& node : counted->nodes) {
                ++out.steps;
                if (is_provable(node.kind)) ++out.provable;
            }
        }
        return;
    }

    const auto score = artifacts::read_score(dir);
    if (!score) throw ParseError("problem '" + problem.id + "': missing " + artifacts::kScoreFile);

    std::map<std::string, bool> formal_ok, checked;
    bool all_ok = true;
    for (const auto& node : record.build.graph.nodes) {
        const FormalizedNode& fnode = record.formal.at(node.id);
        const bool cf = fnode.c_formalizer && fnode.passed_at_attempt <= k;
        bool c = cf;
        ++out.steps;
        out.formal_ok += cf;
        if (is_provable(node.kind)) {
            const CompletedNode& completed = record.completed.at(node.id);
            c = cf && completed.c_tactic && completed.passed_at_attempt <= k;
            ++out.provable;
            out.tactic_ok += c;
        }
        formal_ok[node.id] = cf;
        checked[node.id] = c;
        all_ok = all_ok && c;
    }
    out.correct_syntax = all_ok;

    double sum = 0.0;
    for (const auto& n : score->nodes) {
        if (!checked.count(n.id)) throw ParseError("problem '" + problem.id + "': score names unknown node " + n.id);
        if (checked.at(n.id) && n.structural) sum += n.f;
        auto source = error_source_from_string(n.error_source);
        if (!source) throw ParseError("problem '" + problem.id + "': invalid error source " + n.error_source);
        out.error_sources.push_back(*source);
    }
    out.proofscore = score->n > 0 ? sum / score->n : 0.0;
}

void summarize_baseline(const fs::path& dir, const BenchmarkProblem& problem, Strategy strategy, int k,
                        ProblemSummary& out) {
    const BaselineRun run = artifacts::read_baseline(dir);
    const auto score = artifacts::read_score(dir);
    if (!score) throw ParseError("problem '" + problem.id + "': missing " + artifacts::kScoreFile);

    std::map<std::string, bool> ok;
    bool prefix_ok = true;
    for (const auto& u : run.units) {
        prefix_ok = prefix_ok && u.status == StepStatus::Passed && u.passed_at_attempt <= k;
        ok[u.label] = prefix_ok;
    }
    if (strategy == Strategy::FullProof) {
        ok["proof"] = run.proof_level_ok && prefix_ok;
    } else {
        out.steps = static_cast<int>(run.units.size());
        out.provable = out.steps;
        for (const auto& [label, passed] : ok) out.tactic_ok += passed;
    }
    out.correct_syntax = prefix_ok && (strategy == Strategy::StepProof || run.proof_level_ok);

    double sum = 0.0;
    for (const auto& n : score->nodes) {
        if (!ok.count(n.id)) throw ParseError("problem '" + problem.id + "': score names unknown unit " + n.id);
        if (ok.at(n.id)) sum += n.f;
    }
    out.proofscore = score->n > 0 ? sum / score->n : 0.0;
}

}  // namespace

ProblemSummary summarize_problem(const fs::path& dir, Strategy strategy, int k) {
    if (k < 1) throw ContractViolation("pass@k needs k >= 1");
    const BenchmarkProblem problem = artifacts::read_problem(dir);
    const auto status = artifacts::read_status(dir);
    const auto timing = artifacts::read_timing(dir);

    ProblemSummary out;
    out.id = problem.id;
    out.wall_ms = timing ? timing->wall_ms : 0;
    out.output_tokens = output_tokens(dir);
    out.crashed = !status || status->state != "complete";
    if (out.crashed) {
        if (is_pipeline(strategy) && !problem.truth_graphs.empty()) {
            for (const auto& node : problem.truth_graphs.front().nodes) {
                ++out.steps;
                if (is_provable(node.kind)) ++out.provable;
            }
        } else if (strategy == Strategy::StepProof) {
            out.steps = out.provable = std::max<int>(1, static_cast<int>(problem.proof_steps.size()));
        }
        return out;
    }
    if (is_pipeline(strategy)) summarize_pipeline(dir, problem, k, out);
    else summarize_baseline(dir, problem, strategy, k, out);
    return out;
}

RunMetrics aggregate_metrics(const std::vector<ProblemSummary>& summaries, Strategy strategy, bool thinking,
                             int pass_k, bool prefix) {
    RunMetrics m;
    m.strategy = std::string(strategy_id(strategy));
    m.mode = std::string(strategy_mode(strategy));
    m.thinking = thinking;
    m.pass_k = pass_k;
    m.problems = static_cast<int>(summaries.size());

    long steps = 0, formal_ok = 0, provable = 0, tactic_ok = 0;
    double proofscore = 0.0, syntax = 0.0, wall_ms = 0.0, tokens = 0.0;
    for (const auto& s : summaries) {
        steps += s.steps;
        formal_ok += s.formal_ok;
        provable += s.provable;
        tactic_ok += s.tactic_ok;
        proofscore += s.proofscore;
        syntax += s.correct_syntax ? 1.0 : 0.0;
        wall_ms += static_cast<double>(s.wall_ms);
        tokens += static_cast<double>(s.output_tokens);
    }
    auto ratio = [](double num, double den) { return den > 0 ? num / den : 0.0; };
    const double n = static_cast<double>(summaries.size());

    if (is_pipeline(strategy)) {
        m.total_steps = static_cast<int>(steps);
        m.formalizer_accuracy = ratio(static_cast<double>(formal_ok), static_cast<double>(steps));
        m.tactic_accuracy = ratio(static_cast<double>(tactic_ok), static_cast<double>(provable));
    } else if (strategy == Strategy::StepProof) {
        m.total_steps = static_cast<int>(steps);
        m.tactic_accuracy = ratio(static_cast<double>(tactic_ok), static_cast<double>(provable));
    }
    m.proofscore = ratio(proofscore, n);
    m.correct_syntax = ratio(syntax, n);
    if (!prefix) {
        m.time_minutes = ratio(wall_ms, n) / 60000.0;
        m.output_tokens_k = ratio(tokens, n) / 1000.0;
    }
    return m;
}

Json manifest_to_json(const Manifest& m) {
    return {{"tool_version", m.tool_version},
            {"strategy", strategy_id(m.strategy)},
            {"pass_k", m.pass_k},
            {"prefix_k", m.prefix_k},
            {"thinking", m.thinking},
            {"clock", m.clock},
            {"created", m.created},
            {"prompts_version", m.prompts_version},
            {"providers", m.providers},
            {"verifier", m.verifier},
            {"minor_weight", m.minor_weight},
            {"threshold", m.threshold},
            {"score_provable_only", m.score_provable_only},
            {"problems", m.problems}};
}

Manifest manifest_from_json(const Json& json) {
    try {
        Manifest m;
        m.tool_version = json.at("tool_version").get<std::string>();
        const auto strategy = strategy_from_string(json.at("strategy").get<std::string>());
        if (!strategy) throw ParseError("manifest: invalid strategy");
        m.strategy = *strategy;
        m.pass_k = json.at("pass_k").get<int>();
        m.prefix_k = json.at("prefix_k").get<std::vector<int>>();
        m.thinking = json.at("thinking").get<bool>();
        m.clock = json.at("clock").get<std::string>();
        m.created = json.at("created").get<std::string>();
        m.prompts_version = json.at("prompts_version").get<std::string>();
        m.providers = json.at("providers");
        m.verifier = json.at("verifier").get<std::string>();
        m.minor_weight = json.at("minor_weight").get<double>();
        m.threshold = json.at("threshold").get<double>();
        m.score_provable_only = json.at("score_provable_only").get<bool>();
        m.problems = json.at("problems").get<std::vector<std::string>>();
        if (m.pass_k < 1) throw ParseError("manifest: pass_k must be >= 1");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("manifest.json: ") + e.what());
    }
}

Manifest read_manifest(const fs::path& run_dir) {
    const fs::path path = run_dir / "manifest.json";
    if (!fs::exists(path)) throw ParseError("no manifest.json in " + run_dir.filename().string());
    return manifest_from_json(read_json_file(path));
}

std::vector<RunMetrics> compute_run_metrics(const fs::path& run_dir) {
    const Manifest manifest = read_manifest(run_dir);
    std::vector<int> ks = {manifest.pass_k};
    for (int k : manifest.prefix_k)
        if (k >= 1 && k < manifest.pass_k && std::find(ks.begin(), ks.end(), k) == ks.end()) ks.push_back(k);

    std::vector<RunMetrics> rows;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        std::vector<ProblemSummary> summaries;
        for (const auto& id : manifest.problems)
            summaries.push_back(summarize_problem(run_dir / id, manifest.strategy, ks[i]));
        rows.push_back(aggregate_metrics(summaries, manifest.strategy, manifest.thinking, ks[i], i > 0));
    }
    return rows;
}

std::optional<ErrorTable> run_error_table(const fs::path& run_dir) {
    const Manifest manifest = read_manifest(run_dir);
    if (!is_pipeline(manifest.strategy)) return std::nullopt;
    std::vector<ErrorSource> sources;
    for (const auto& id : manifest.problems) {
        const ProblemSummary s = summarize_problem(run_dir / id, manifest.strategy, manifest.pass_k);
        sources.insert(sources.end(), s.error_sources.begin(), s.error_sources.end());
    }
    return tabulate_errors(sources, run_dir.filename().string());
}

namespace {

std::string fixed3(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", value);
    return buf;
}

template <typename T>
std::string cell(const std::optional<T>& value) {
    if (!value) return "/";
    if constexpr (std::is_integral_v<T>) return std::to_string(*value);
    else return fixed3(*value);
}

const char* kMetricsHeader =
    "strategy,thinking,k,problems,total_steps,form_accuracy,tactic_accuracy,proofscore,correct_syntax,time_mins,"
    "output_tokens_k";

std::vector<std::string> metrics_cells(const RunMetrics& m) {
    return {m.strategy,
            m.thinking ? "thinking" : "standard",
            std::to_string(m.pass_k),
            std::to_string(m.problems),
            cell(m.total_steps),
            cell(m.formalizer_accuracy),
            cell(m.tactic_accuracy),
            fixed3(m.proofscore),
            fixed3(m.correct_syntax),
            cell(m.time_minutes),
            cell(m.output_tokens_k)};
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream in(line);
    std::string part;
    while (std::getline(in, part, ',')) out.push_back(part);
    return out;
}

}  // namespace

std::string metrics_csv(const std::vector<RunMetrics>& rows) {
    std::string out = std::string(kMetricsHeader) + "\n";
    for (const auto& row : rows) {
        const auto cells = metrics_cells(row);
        for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
        out += "\n";
    }
    return out;
}

Json metrics_table_json(const std::vector<RunMetrics>& rows) {
    const auto header = split_csv_line(kMetricsHeader);
    Json out = Json::array();
    for (const auto& row : rows) {
        const auto cells = metrics_cells(row);
        Json obj = Json::object();
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const std::string& c = cells[i];
            if (c == "/") obj[header[i]] = nullptr;
            else if (i < 2) obj[header[i]] = c;
            else if (i < 5) obj[header[i]] = std::stoi(c);
            else obj[header[i]] = std::stod(c);
        }
        out.push_back(std::move(obj));
    }
    return out;
}

void emit_tables(const std::vector<fs::path>& run_dirs, const fs::path& out_dir) {
    if (run_dirs.empty()) throw ContractViolation("emit_tables needs at least one run");
    std::vector<RunMetrics> rows;
    std::vector<ErrorTable> errors;
    for (const auto& dir : run_dirs) {
        const auto metrics = compute_run_metrics(dir);
        rows.insert(rows.end(), metrics.begin(), metrics.end());
        if (auto table = run_error_table(dir)) errors.push_back(std::move(*table));
    }
    write_text_file(out_dir / "tables.csv", metrics_csv(rows));
    write_json_file(out_dir / "tables.json", metrics_table_json(rows));
    write_text_file(out_dir / "errors.csv", error_tables_csv(errors));
    write_json_file(out_dir / "errors.json", error_tables_json(errors));
}

std::string run_timestamp(ClockMode clock) {
    if (clock == ClockMode::Simulated) return "19700101T000000Z";
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

fs::path run_directory(const fs::path& out, ClockMode clock, Strategy strategy) {
    return out / (run_timestamp(clock) + "-" + std::string(strategy_id(strategy)));
}

namespace {

std::vector<std::string> baseline_steps(const BenchmarkProblem& problem) {
    if (!problem.proof_steps.empty()) return problem.proof_steps;
    return {problem.proof_nl};
}

void run_stages(const BenchmarkProblem& problem, const fs::path& dir, const BenchConfig& config,
                const Backends& backends) {
    const StageOptions& stage = config.options.stage;
    if (is_pipeline(config.strategy)) {
        const PipelineRecord record = run_pipeline(
            problem.theorem_nl, problem.proof_nl, premise_mode(config.strategy), !problem.truth_graphs.empty(),
            backends, config.options, [&](const PipelineRecord& partial) { artifacts::write_pipeline(dir, partial); });
        artifacts::write_pipeline(dir, record);
        const ScoreReport score = pipeline_score_report(record, problem.id, problem.truth_graphs, config.options);
        artifacts::write_score(dir, score);
        write_text_file(dir / artifacts::kReportFile,
                        render_report_html(report_payload(record, score, problem.id)));
        return;
    }

    if (!backends.formalizer) throw ConfigError("no provider configured for stage 'formalizer'");
    if (!backends.judge) throw ConfigError("no provider configured for stage 'judge'");
    if (!backends.verifier) throw ConfigError("no verifier configured");
    const BaselineRun run =
        config.strategy == Strategy::FullProof
            ? run_full_proof(problem.theorem_nl, problem.proof_nl, *backends.formalizer, *backends.verifier, stage)
            : run_step_proof(problem.theorem_nl, baseline_steps(problem), *backends.formalizer, *backends.verifier,
                             stage);
    const BaselineScore score =
        score_baseline(run, problem.id, *backends.judge, stage.prompts, stage.policy, config.options.minor_weight);
    artifacts::write_baseline(dir, run, score.records);
    artifacts::write_score(dir, score.report);
}

std::int64_t simulated_wall_ms(const fs::path& dir) {
    std::int64_t total = 0;
    try {
        for (const auto& e : artifacts::recorded_exchanges(dir)) total += e.latency_ms;
        total += artifacts::recorded_verifier_ms(dir);
    } catch (const Error&) {
        // partial artifacts of a crashed problem
    }
    return total;
}

}  // namespace

artifacts::Status run_problem(const BenchmarkProblem& problem, const fs::path& dir, const BenchConfig& config,
                              const Backends& backends) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    artifacts::write_problem(dir, problem);

    const auto start = std::chrono::steady_clock::now();
    artifacts::Status status{"complete", "", ""};
    try {
        run_stages(problem, dir, config, backends);
    } catch (const BackendError& e) {
        status = {"failed", "backend", e.what()};
    } catch (const ConfigError& e) {
        status = {"failed", "config", e.what()};
    } catch (const std::exception& e) {
        status = {"failed", "other", e.what()};
    }

    artifacts::Timing timing;
    if (config.clock == ClockMode::Simulated) {
        timing = {"simulated", simulated_wall_ms(dir)};
    } else {
        const auto elapsed = std::chrono::steady_clock::now() - start;
        timing = {"system", std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count()};
    }
    artifacts::write_timing(dir, timing);
    artifacts::write_status(dir, status);
    return status;
}

namespace {

Manifest make_manifest(const std::vector<BenchmarkProblem>& problems, const BenchConfig& config) {
    Manifest m;
    m.tool_version = kToolVersion;
    m.strategy = config.strategy;
    m.pass_k = config.options.stage.policy.max_attempts;
    m.prefix_k = config.prefix_k;
    m.thinking = config.thinking;
    m.clock = config.clock == ClockMode::Simulated ? "simulated" : "system";
    m.created = run_timestamp(config.clock);
    m.prompts_version = config.options.stage.prompts.version();
    m.providers = config.providers;
    m.verifier = config.verifier;
    m.minor_weight = config.options.minor_weight;
    m.threshold = config.options.threshold;
    m.score_provable_only = config.options.score_provable_only;
    for (const auto& p : problems) m.problems.push_back(p.id);
    return m;
}

void write_run_outputs(const fs::path& run_dir, const std::vector<RunMetrics>& metrics) {
    Json rows = Json::array();
    for (const auto& m : metrics) rows.push_back(metrics_to_json(m));
    write_json_file(run_dir / "metrics.json", rows);
    emit_tables({run_dir}, run_dir);
}

}  // namespace

BenchResult run_benchmark(const std::vector<BenchmarkProblem>& problems, const fs::path& run_dir,
                          const BenchConfig& config, const Backends& backends) {
    if (config.jobs < 1) throw ConfigError("--jobs must be >= 1");
    if (config.options.stage.policy.max_attempts < 1) throw ConfigError("--pass-at must be >= 1");
    fs::create_directories(run_dir);
    write_json_file(run_dir / "manifest.json", manifest_to_json(make_manifest(problems, config)));

    BenchResult result;
    result.run_dir = run_dir;
    result.problems.resize(problems.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < problems.size(); i = next++) {
            const auto& problem = problems[i];
            const fs::path dir = run_dir / problem.id;
            ProblemRun& slot = result.problems[i];
            slot.id = problem.id;
            if (!config.force) {
                const auto status = artifacts::read_status(dir);
                if (status && status->state == "complete") {
                    slot.status = *status;
                    slot.skipped = true;
                    continue;
                }
            }
            slot.status = run_problem(problem, dir, config, backends);
        }
    };
    const int threads = std::min<int>(config.jobs, static_cast<int>(std::max<std::size_t>(problems.size(), 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    result.metrics = compute_run_metrics(run_dir);
    write_run_outputs(run_dir, result.metrics);
    return result;
}

void rescore_problem(const fs::path& dir, Strategy strategy, const PipelineOptions& options, Provider* judge) {
    const BenchmarkProblem problem = artifacts::read_problem(dir);
    const StageOptions& stage = options.stage;
    if (!is_pipeline(strategy)) {
        const BaselineRun run = artifacts::read_baseline(dir);
        std::vector<FaithfulnessRecord> records = artifacts::read_baseline_faithfulness(dir);
        if (records.size() != run.units.size()) {
            if (!judge) throw ConfigError("faithfulness records missing and no judge provider configured");
            records = judge_baseline(run, *judge, stage.prompts, stage.policy, options.minor_weight);
            artifacts::write_baseline(dir, run, records);
        }
        artifacts::write_score(dir, baseline_score_report(run, problem.id, records));
        return;
    }

    PipelineRecord record = artifacts::read_pipeline(dir);
    bool judged = false;
    if (record.build.passed) {
        for (const auto& node : record.build.graph.nodes) {
            if (record.faithfulness.count(node.id)) continue;
            if (!judge) throw ConfigError("faithfulness records missing and no judge provider configured");
            const FormalizedNode& fnode = record.formal.at(node.id);
            record.faithfulness.emplace(node.id,
                                        score_faithfulness(node.id, node.nl_self_contained, fnode.statement,
                                                           fnode.c_formalizer, *judge, stage.prompts, stage.policy,
                                                           options.minor_weight));
            judged = true;
        }
    }
    if (judged) artifacts::write_pipeline(dir, record);
    const ScoreReport score = pipeline_score_report(record, problem.id, problem.truth_graphs, options);
    artifacts::write_score(dir, score);
    if (record.build.passed) write_report(dir);
}

std::vector<RunMetrics> rescore_run(const fs::path& run_dir, Provider* judge, const PromptLibrary& prompts) {
    const Manifest manifest = read_manifest(run_dir);
    PipelineOptions options;
    options.stage.prompts = prompts;
    options.stage.policy.max_attempts = manifest.pass_k;
    options.minor_weight = manifest.minor_weight;
    options.threshold = manifest.threshold;
    options.score_provable_only = manifest.score_provable_only;
    for (const auto& id : manifest.problems) {
        const fs::path dir = run_dir / id;
        const auto status = artifacts::read_status(dir);
        if (!status || status->state != "complete") continue;
        rescore_problem(dir, manifest.strategy, options, judge);
    }
    const auto metrics = compute_run_metrics(run_dir);
    write_run_outputs(run_dir, metrics);
    return metrics;
}

}  // namespace proofflow
