#include "proofflow/baselines.hpp"

#include "proofflow/error.hpp"
#include "proofflow/lean_text.hpp"

#include <algorithm>

namespace proofflow {

std::string_view to_string(BaselineKind kind) { return kind == BaselineKind::FullProof ? "FullProof" : "StepProof"; }

std::string_view to_string(StepStatus status) {
    switch (status) {
    case StepStatus::Passed: return "passed";
    case StepStatus::Failed: return "failed";
    case StepStatus::CascadeFailed: return "cascade_failed";
    }
    return "?";
}

std::vector<ChatExchange> BaselineRun::all_attempts() const {
    std::vector<ChatExchange> out;
    for (const auto& u : units) out.insert(out.end(), u.attempts.begin(), u.attempts.end());
    return out;
}

Json baseline_to_json(const BaselineRun& run) {
    Json units = Json::array();
    for (const auto& u : run.units) {
        Json attempts = Json::array();
        for (const auto& a : u.attempts) attempts.push_back(exchange_to_json(a));
        units.push_back({{"label", u.label},
                         {"nl_text", u.nl_text},
                         {"model_output", u.model_output},
                         {"status", to_string(u.status)},
                         {"passed_at_attempt", u.passed_at_attempt},
                         {"unit", unit_to_json(u.unit)},
                         {"report", report_to_json(u.report)},
                         {"attempts", std::move(attempts)}});
    }
    return {{"kind", to_string(run.kind)}, {"proof_level_ok", run.proof_level_ok}, {"units", std::move(units)}};
}

BaselineRun baseline_from_json(const Json& json) {
    try {
        BaselineRun run;
        const auto kind = json.at("kind").get<std::string>();
        if (kind == "FullProof") run.kind = BaselineKind::FullProof;
        else if (kind == "StepProof") run.kind = BaselineKind::StepProof;
        else throw ParseError("baseline record: invalid kind \"" + kind + "\"");
        run.proof_level_ok = json.at("proof_level_ok").get<bool>();
        for (const auto& u : json.at("units")) {
            BaselineUnit unit;
            unit.label = u.at("label").get<std::string>();
            unit.nl_text = u.at("nl_text").get<std::string>();
            unit.model_output = u.at("model_output").get<std::string>();
            const auto status = u.at("status").get<std::string>();
            if (status == "passed") unit.status = StepStatus::Passed;
            else if (status == "failed") unit.status = StepStatus::Failed;
            else if (status == "cascade_failed") unit.status = StepStatus::CascadeFailed;
            else throw ParseError("baseline record: invalid status \"" + status + "\"");
            unit.passed_at_attempt = u.at("passed_at_attempt").get<int>();
            unit.unit = unit_from_json(u.at("unit"));
            unit.report = report_from_json(u.at("report"));
            for (const auto& a : u.at("attempts")) unit.attempts.push_back(exchange_from_json(a));
            run.units.push_back(std::move(unit));
        }
        return run;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("baseline record: ") + e.what());
    }
}

BaselineRun run_full_proof(const std::string& theorem_nl, const std::string& proof_nl, Provider& provider,
                           Verifier& verifier, const StageOptions& options) {
    ChatRequest request;
    request.system_prompt = options.prompts.get("full_proof.system");
    request.messages.push_back(
        {Role::User, options.prompts.render("full_proof.user", {{"theorem", theorem_nl}, {"proof", proof_nl}})});

    BaselineUnit unit;
    unit.label = "proof";
    unit.nl_text = theorem_nl + "\n\nProof:\n" + proof_nl;
    int attempt = 0;
    auto check = [&](const std::string& response) {
        ++attempt;
        unit.model_output = lean::strip_code_fences(response);
        unit.unit = make_unit("proof." + std::to_string(attempt), unit.model_output, options.header);
        unit.report = VerifierReport{unit.unit.unit_id, false, {}, false, 0};
        if (lean::contains_placeholder(unit.model_output)) return CheckResult::fail("the proof contains 'sorry'");
        unit.report = verifier.check(unit.unit);
        if (!unit.report.ok) return CheckResult::fail(first_error_summary(unit.report));
        if (unit.report.contains_sorry_warning) return CheckResult::fail("declaration uses 'sorry'");
        return CheckResult::pass();
    };
    RetryOutcome outcome = retry_with_feedback(provider, request, options.policy, check);
    unit.attempts = std::move(outcome.attempts);
    unit.status = outcome.passed ? StepStatus::Passed : StepStatus::Failed;
    unit.passed_at_attempt = outcome.passed ? static_cast<int>(unit.attempts.size()) : 0;

    BaselineRun run;
    run.kind = BaselineKind::FullProof;
    run.proof_level_ok = outcome.passed;
    run.units.push_back(std::move(unit));
    return run;
}

namespace {

bool only_open_goals(const VerifierReport& report) {
    return std::all_of(report.diagnostics.begin(), report.diagnostics.end(), [](const Diagnostic& d) {
        return d.severity != Severity::Error || d.message.rfind("unsolved goals", 0) == 0;
    });
}

std::string numbered(const std::vector<std::string>& steps) {
    std::string out;
    for (std::size_t i = 0; i < steps.size(); ++i)
        out += (i ? "\n" : "") + std::to_string(i + 1) + ". " + steps[i];
    return out;
}

}  // namespace

BaselineRun run_step_proof(const std::string& theorem_nl, const std::vector<std::string>& proof_steps,
                           Provider& provider, Verifier& verifier, const StageOptions& options) {
    if (proof_steps.empty()) throw ContractViolation("run_step_proof needs at least one proof step");

    BaselineRun run;
    run.kind = BaselineKind::StepProof;
    std::string script;
    bool halted = false;

    for (std::size_t i = 0; i < proof_steps.size(); ++i) {
        const bool last = i + 1 == proof_steps.size();
        BaselineUnit unit;
        unit.label = "step" + std::to_string(i + 1);
        unit.nl_text = proof_steps[i];
        if (halted) {
            unit.status = StepStatus::CascadeFailed;
            unit.unit = make_unit(unit.label + ".skipped", script, options.header);
            unit.report = finalize_report(
                {unit.unit.unit_id, false, {{Severity::Error, 1, 0, "not attempted: an earlier step failed"}}, false, 0});
            run.units.push_back(std::move(unit));
            continue;
        }

        ChatRequest request;
        request.system_prompt = options.prompts.get("step_proof.system");
        request.messages.push_back({Role::User, options.prompts.render("step_proof.user",
                                                                      {{"theorem", theorem_nl},
                                                                       {"steps", numbered(proof_steps)},
                                                                       {"script", script.empty() ? "(empty)" : script},
                                                                       {"step_index", std::to_string(i + 1)},
                                                                       {"step", proof_steps[i]}})});
        std::string candidate;
        int attempt = 0;
        auto check = [&](const std::string& response) {
            ++attempt;
            // Passed through unmodified: indentation is the model's responsibility.
            unit.model_output = lean::strip_code_fences(response);
            candidate = script.empty() ? unit.model_output : script + "\n" + unit.model_output;
            unit.unit = make_unit(unit.label + "." + std::to_string(attempt), candidate, options.header);
            unit.report = VerifierReport{unit.unit.unit_id, false, {}, false, 0};
            if (lean::contains_placeholder(unit.model_output)) return CheckResult::fail("the step contains 'sorry'");
            unit.report = verifier.check(unit.unit);
            if (last) {
                if (!unit.report.ok) return CheckResult::fail(first_error_summary(unit.report));
                if (unit.report.contains_sorry_warning) return CheckResult::fail("declaration uses 'sorry'");
            } else if (!only_open_goals(unit.report)) {
                return CheckResult::fail(first_error_summary(unit.report));
            }
            return CheckResult::pass();
        };
        RetryOutcome outcome = retry_with_feedback(provider, request, options.policy, check);
        unit.attempts = std::move(outcome.attempts);
        if (outcome.passed) {
            unit.status = StepStatus::Passed;
            unit.passed_at_attempt = static_cast<int>(unit.attempts.size());
            script = candidate;
        } else {
            unit.status = StepStatus::Failed;
            halted = true;
        }
        run.units.push_back(std::move(unit));
    }
    run.proof_level_ok = !halted;
    return run;
}

double step_accuracy(const BaselineRun& run) {
    if (run.units.empty()) return 0.0;
    const auto passed = std::count_if(run.units.begin(), run.units.end(),
                                      [](const BaselineUnit& u) { return u.status == StepStatus::Passed; });
    return static_cast<double>(passed) / static_cast<double>(run.units.size());
}

std::vector<FaithfulnessRecord> judge_baseline(const BaselineRun& run, Provider& judge, const PromptLibrary& prompts,
                                               const RetryPolicy& policy, double minor_weight) {
    std::vector<FaithfulnessRecord> records;
    for (const auto& u : run.units) {
        const bool checked = run.kind == BaselineKind::FullProof ? run.proof_level_ok : u.status == StepStatus::Passed;
        records.push_back(
            score_faithfulness(u.label, u.nl_text, u.model_output, checked, judge, prompts, policy, minor_weight));
    }
    return records;
}

ScoreReport baseline_score_report(const BaselineRun& run, const std::string& problem_id,
                                  const std::vector<FaithfulnessRecord>& records) {
    if (run.units.empty()) throw ContractViolation("baseline run for '" + problem_id + "' has no units");
    ScoreReport report;
    report.problem = problem_id;
    report.mode = std::string(to_string(run.kind));
    std::map<std::string, double> f;
    std::map<std::string, bool> c, structural;
    for (const auto& u : run.units) {
        auto it = std::find_if(records.begin(), records.end(),
                               [&](const FaithfulnessRecord& r) { return r.node_id == u.label; });
        if (it == records.end())
            throw ParseError("problem '" + problem_id + "': no faithfulness record for '" + u.label + "'");
        const bool checked = run.kind == BaselineKind::FullProof ? run.proof_level_ok : u.status == StepStatus::Passed;
        report.nodes.push_back({u.label, it->f, checked, true, "NotApplicable"});
        f[u.label] = it->f;
        c[u.label] = checked;
        structural[u.label] = true;
    }
    report.n = static_cast<int>(report.nodes.size());
    report.proofscore = proof_score(f, c, structural);
    return report;
}

BaselineScore score_baseline(const BaselineRun& run, const std::string& problem_id, Provider& judge,
                             const PromptLibrary& prompts, const RetryPolicy& policy, double minor_weight) {
    BaselineScore score;
    score.records = judge_baseline(run, judge, prompts, policy, minor_weight);
    score.report = baseline_score_report(run, problem_id, score.records);
    return score;
}

}  // namespace proofflow
