#include "proofflow/cli.hpp"

#include "proofflow/error.hpp"
#include "proofflow/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>

namespace proofflow {

namespace fs = std::filesystem;

VerifierReport UnavailableVerifier::check(const CodeUnit&) {
    throw TransportError("no verifier configured (pass --verifier-url, set PROOFFLOW_VERIFIER_URL or use "
                         "--mock-verifier)");
}

ProviderSet load_providers(const fs::path& file, std::shared_ptr<TraceSink> trace, const fs::path& record_dir) {
    if (!fs::exists(file)) throw ConfigError("providers file " + file.string() + " does not exist");
    Json json;
    try {
        json = read_json_file(file);
    } catch (const Error& e) {
        throw ConfigError(std::string("providers file: ") + e.what());
    }
    if (!json.is_object()) throw ConfigError("providers file must hold a JSON object");
    static const std::vector<std::string> stages = {"graph_builder", "formalizer", "tactic", "judge"};
    for (const auto& item : json.items())
        if (item.key() != "default" && std::find(stages.begin(), stages.end(), item.key()) == stages.end())
            throw ConfigError("providers file: unknown stage '" + item.key() + "'");

    const fs::path base = file.parent_path();
    std::map<std::string, std::shared_ptr<Provider>> built;  // by provider id, so stages share instances
    ProviderSet set;
    auto make = [&](const std::string& stage) -> std::shared_ptr<Provider> {
        const Json* cfg = json.contains(stage) ? &json.at(stage) : json.contains("default") ? &json.at("default") : nullptr;
        if (!cfg) throw ConfigError("providers file: no entry for stage '" + stage + "' and no default");
        const ProviderConfig config = provider_config_from_json(*cfg, base);
        set.summary[stage] = {{"id", config.id}, {"kind", config.kind}, {"model", config.model}, {"thinking", config.thinking}};
        if (stage == "formalizer") set.thinking = config.thinking;
        if (auto it = built.find(config.id); it != built.end()) return it->second;
        std::shared_ptr<Provider> provider = make_provider(config, trace);
        if (!record_dir.empty()) provider = std::make_shared<RecordingProvider>(provider, record_dir);
        built.emplace(config.id, provider);
        return provider;
    };
    set.graph_builder = make("graph_builder");
    set.formalizer = make("formalizer");
    set.tactic = make("tactic");
    set.judge = make("judge");
    return set;
}

namespace {

struct Options {
    std::string strategy = "dag";
    int pass_at = 5;
    std::string providers;
    std::string verifier_url;
    bool mock_verifier = false;
    std::string mock_rules;
    std::string prompts;
    std::string out = "runs";
    std::string run_dir;
    int jobs = 1;
    bool trace = false;
    bool force = false;
    bool score_provable_only = false;
    std::string clock = "system";
    std::string record_fixtures;
    std::vector<int> prefix_k;
    std::string theorem;
    std::string proof;
    std::string id = "inline";
    std::string area;
    std::vector<std::string> positional;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--strategy", o.strategy, "dag | nodag | full | step")
        ->check(CLI::IsMember({"dag", "nodag", "full", "step", "full_proof", "step_proof"}));
    cmd->add_option("--pass-at", o.pass_at, "attempts per stage (k of pass@k)")->check(CLI::PositiveNumber);
    cmd->add_option("--providers", o.providers, "providers JSON file");
    cmd->add_option("--verifier-url", o.verifier_url, "checking service base URL");
    cmd->add_flag("--mock-verifier", o.mock_verifier, "use the in-process mock checker");
    cmd->add_option("--mock-rules", o.mock_rules, "mock checker table/rules JSON");
    cmd->add_option("--prompts", o.prompts, "directory of prompt overrides");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--jobs", o.jobs, "problems run concurrently")->check(CLI::PositiveNumber);
    cmd->add_flag("--trace", o.trace, "write redacted provider transcripts");
    cmd->add_flag("--force", o.force, "rerun problems that already completed");
    cmd->add_flag("--score-provable-only", o.score_provable_only, "average ProofScore over lemmas and solutions");
    cmd->add_option("--clock", o.clock, "system | simulated")->check(CLI::IsMember({"system", "simulated"}));
    cmd->add_option("--record-fixtures", o.record_fixtures, "save every provider exchange as a fixture");
}

PromptLibrary load_prompts(const Options& o) {
    return o.prompts.empty() ? PromptLibrary::builtin() : PromptLibrary::with_overrides(o.prompts);
}

std::shared_ptr<Verifier> make_verifier(const Options& o, std::string& summary) {
    if (o.mock_verifier) {
        summary = "mock";
        if (o.mock_rules.empty()) return std::make_shared<MockVerifier>();
        if (!fs::exists(o.mock_rules)) throw ConfigError("mock rules file " + o.mock_rules + " does not exist");
        return std::make_shared<MockVerifier>(MockVerifier::from_file(o.mock_rules));
    }
    std::string url = o.verifier_url;
    if (url.empty())
        if (const char* env = std::getenv("PROOFFLOW_VERIFIER_URL")) url = env;
    if (url.empty()) {
        summary = "none";
        return std::make_shared<UnavailableVerifier>();
    }
    summary = "http";
    return std::make_shared<HttpVerifier>(url);
}

struct Setup {
    BenchConfig config;
    Backends backends;
};

Setup make_setup(const Options& o, const fs::path& trace_dir) {
    Setup s;
    const auto strategy = strategy_from_string(o.strategy);
    if (!strategy) throw ConfigError("unknown strategy '" + o.strategy + "'");
    s.config.strategy = *strategy;
    s.config.options.stage.prompts = load_prompts(o);
    s.config.options.stage.policy.max_attempts = o.pass_at;
    s.config.options.score_provable_only = o.score_provable_only;
    s.config.clock = o.clock == "simulated" ? ClockMode::Simulated : ClockMode::System;
    s.config.jobs = o.jobs;
    s.config.force = o.force;
    s.config.prefix_k = o.prefix_k;

    if (o.providers.empty()) throw ConfigError("--providers is required");
    std::shared_ptr<TraceSink> trace = o.trace ? std::make_shared<TraceSink>(trace_dir) : nullptr;
    ProviderSet providers = load_providers(o.providers, trace, o.record_fixtures);
    s.config.providers = providers.summary;
    s.config.thinking = providers.thinking;
    s.backends.graph_builder = providers.graph_builder;
    s.backends.formalizer = providers.formalizer;
    s.backends.tactic = providers.tactic;
    s.backends.judge = providers.judge;
    s.backends.verifier = make_verifier(o, s.config.verifier);
    return s;
}

int exit_for(const artifacts::Status& status) {
    if (status.state == "complete") return kExitOk;
    if (status.error_kind == "backend") return kExitBackend;
    if (status.error_kind == "config") return kExitConfig;
    return kExitOther;
}

std::string status_color(const std::string& status) {
    if (status == "formalize_error") return "red";
    if (status == "formalized_no_tactics") return "orange";
    return "green";
}

void print_summary(const fs::path& dir, std::ostream& out) {
    const PipelineRecord record = artifacts::read_pipeline(dir);
    if (!record.build.passed) {
        out << "graph construction failed after " << record.build.attempts.size() << " attempt(s)\n";
        return;
    }
    const auto score = artifacts::read_score(dir);
    std::map<std::string, NodeScore> by_id;
    if (score)
        for (const auto& n : score->nodes) by_id[n.id] = n;
    out << "legend: red = formalization error, orange = formalized but tactics failed, green = proved\n";
    for (const auto& node : record.build.graph.nodes) {
        const std::string status = node_status(record, node.id);
        char line[256];
        auto it = by_id.find(node.id);
        std::snprintf(line, sizeof line, "  %-8s %-5s %-3s %-22s f=%.3f  %s\n", ("[" + status_color(status) + "]").c_str(),
                      node.id.c_str(), std::string(to_tag(node.kind)).c_str(), status.c_str(),
                      it != by_id.end() ? it->second.f : 0.0,
                      it != by_id.end() ? it->second.error_source.c_str() : "-");
        out << line;
    }
    if (score) {
        char line[128];
        std::snprintf(line, sizeof line, "ProofScore %.4f over %d node(s)\n", score->proofscore, score->n);
        out << line;
    }
}

void print_baseline_summary(const fs::path& dir, std::ostream& out) {
    const BaselineRun run = artifacts::read_baseline(dir);
    for (const auto& u : run.units)
        out << "  " << u.label << ": " << to_string(u.status) << "\n";
    out << "proof-level: " << (run.proof_level_ok ? "ok" : "failed") << "\n";
    if (const auto score = artifacts::read_score(dir)) {
        char line[64];
        std::snprintf(line, sizeof line, "ProofScore %.4f\n", score->proofscore);
        out << line;
    }
}

std::vector<std::string> split_steps(const std::string& proof) {
    std::vector<std::string> steps;
    std::size_t start = 0;
    while (start <= proof.size()) {
        const auto end = proof.find('\n', start);
        std::string line = proof.substr(start, end == std::string::npos ? std::string::npos : end - start);
        line.erase(0, line.find_first_not_of(" \t\r"));
        line.erase(line.find_last_not_of(" \t\r") + 1);
        if (!line.empty()) steps.push_back(line);
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return steps;
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
    BenchmarkProblem problem;
    if (!o.positional.empty()) {
        if (!o.theorem.empty() || !o.proof.empty()) throw ConfigError("give a problem file or --theorem/--proof, not both");
        if (!fs::exists(o.positional.front())) throw ConfigError("problem file " + o.positional.front() + " does not exist");
        try {
            problem = problem_from_json(read_json_file(o.positional.front()),
                                        fs::path(o.positional.front()).filename().string(), false);
        } catch (const ParseError& e) {
            throw ConfigError(e.what());
        }
    } else {
        if (o.theorem.empty() || o.proof.empty()) throw ConfigError("run needs a problem file or both --theorem and --proof");
        problem.id = o.id;
        problem.area = o.area;
        problem.theorem_nl = o.theorem;
        problem.proof_nl = o.proof;
        problem.proof_steps = split_steps(o.proof);
    }

    const fs::path dir = fs::path(o.out) / problem.id;
    Setup setup = make_setup(o, fs::path(o.out) / "trace");
    const artifacts::Status status = run_problem(problem, dir, setup.config, setup.backends);
    out << problem.id << " (" << strategy_id(setup.config.strategy) << ") -> " << dir.string() << "\n";
    try {
        if (is_pipeline(setup.config.strategy)) {
            if (fs::exists(dir / artifacts::kGraphFile)) print_summary(dir, out);
        } else if (status.state == "complete") {
            print_baseline_summary(dir, out);
        }
    } catch (const Error& e) {
        err << "summary unavailable: " << e.what() << "\n";
    }
    if (status.state != "complete") err << "error (" << status.error_kind << "): " << status.error << "\n";
    return exit_for(status);
}

int cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.positional.size() != 1) throw ConfigError("bench needs exactly one dataset directory");
    std::vector<BenchmarkProblem> problems;
    try {
        problems = load_dataset(o.positional.front());
    } catch (const ParseError& e) {
        throw ConfigError(e.what());
    }
    const auto strategy = strategy_from_string(o.strategy);
    if (!strategy) throw ConfigError("unknown strategy '" + o.strategy + "'");
    const ClockMode clock = o.clock == "simulated" ? ClockMode::Simulated : ClockMode::System;
    const fs::path run_dir = o.run_dir.empty() ? run_directory(o.out, clock, *strategy) : fs::path(o.run_dir);
    Setup setup = make_setup(o, run_dir / "trace");

    const BenchResult result = run_benchmark(problems, run_dir, setup.config, setup.backends);
    int code = kExitOk;
    for (const auto& p : result.problems) {
        out << "  " << p.id << ": " << p.status.state << (p.skipped ? " (resumed)" : "") << "\n";
        if (p.status.state == "complete") continue;
        err << p.id << ": " << p.status.error << "\n";
        const int c = exit_for(p.status);
        if (c == kExitConfig || (c == kExitBackend && code != kExitConfig) || (c == kExitOther && code == kExitOk))
            code = c;
    }
    out << "run directory: " << run_dir.string() << "\n" << metrics_csv(result.metrics);
    return code;
}

int cmd_score(const Options& o, std::ostream& out, std::ostream&) {
    if (o.positional.size() != 1) throw ConfigError("score needs exactly one run directory");
    const fs::path run_dir = o.positional.front();
    if (!fs::exists(run_dir / "manifest.json")) throw ConfigError(run_dir.string() + " is not a run directory");
    std::shared_ptr<Provider> judge;
    if (!o.providers.empty()) judge = load_providers(o.providers).judge;
    const auto metrics = rescore_run(run_dir, judge.get(), load_prompts(o));
    out << metrics_csv(metrics);
    return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out, std::ostream&) {
    if (o.positional.empty()) throw ConfigError("report needs at least one run or problem directory");
    std::vector<fs::path> runs;
    for (const auto& p : o.positional) {
        const fs::path path(p);
        if (fs::exists(path / "manifest.json")) {
            runs.push_back(path);
        } else if (fs::exists(path / artifacts::kGraphFile)) {
            write_report(path);
            out << (path / artifacts::kReportFile).string() << "\n";
        } else {
            throw ConfigError(p + " is neither a run directory nor a pipeline problem directory");
        }
    }
    if (!runs.empty()) {
        const fs::path out_dir = runs.size() == 1 && o.out == "runs" ? runs.front() : fs::path(o.out);
        emit_tables(runs, out_dir);
        out << read_text_file(out_dir / "tables.csv");
        out << read_text_file(out_dir / "errors.csv");
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Natural-language proofs to checked Lean proofs, one graph node at a time", "proofflow"};
    app.require_subcommand(1);
    Options o;

    auto* run = app.add_subcommand("run", "run one problem and write its artifacts and report.html");
    add_common(run, o);
    run->add_option("problem", o.positional, "problem JSON file");
    run->add_option("--theorem", o.theorem, "inline theorem text");
    run->add_option("--proof", o.proof, "inline proof text");
    run->add_option("--id", o.id, "problem id for inline input");

    auto* bench = app.add_subcommand("bench", "run every problem of a dataset directory and emit tables");
    add_common(bench, o);
    bench->add_option("dataset", o.positional, "dataset directory")->required();
    bench->add_option("--run-dir", o.run_dir, "exact run directory (default: OUT/TIMESTAMP-STRATEGY)");
    bench->add_option("--prefix-k", o.prefix_k, "also report pass@k for these smaller k")->delimiter(',');

    auto* score = app.add_subcommand("score", "recompute scores and tables of a run from its artifacts");
    score->add_option("run_dir", o.positional, "run directory")->required();
    score->add_option("--providers", o.providers, "providers JSON file (judge for missing records)");
    score->add_option("--prompts", o.prompts, "directory of prompt overrides");

    auto* report = app.add_subcommand("report", "rebuild report.html or metric tables");
    report->add_option("paths", o.positional, "run or problem directories")->required();
    report->add_option("--out", o.out, "where tables of several runs go");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) return cmd_run(o, out, err);
        if (*bench) return cmd_bench(o, out, err);
        if (*score) return cmd_score(o, out, err);
        return cmd_report(o, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const BackendError& e) {
        err << "backend error: " << e.what() << "\n";
        return kExitBackend;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitOther;
    }
}

}  // namespace proofflow
