#include "proofflow/scoring.hpp"

#include "proofflow/error.hpp"

#include <algorithm>
#include <functional>

namespace proofflow {

std::string_view to_string(Rating rating) {
    switch (rating) {
    case Rating::PerfectMatch: return "perfect_match";
    case Rating::MinorInconsistency: return "minor_inconsistency";
    case Rating::MajorInconsistency: return "major_inconsistency";
    }
    return "?";
}

std::optional<Rating> rating_from_string(std::string_view text) {
    for (Rating r : {Rating::PerfectMatch, Rating::MinorInconsistency, Rating::MajorInconsistency})
        if (to_string(r) == text) return r;
    return std::nullopt;
}

double rating_score(Rating rating, double minor_weight) {
    switch (rating) {
    case Rating::PerfectMatch: return 1.0;
    case Rating::MinorInconsistency: return minor_weight;
    case Rating::MajorInconsistency: return 0.0;
    }
    return 0.0;
}

double sugeno_integral(std::vector<double> scores) {
    if (scores.empty()) throw ContractViolation("Sugeno integral of an empty score list");
    for (double s : scores)
        if (!(s >= 0.0 && s <= 1.0)) throw ContractViolation("component score outside [0, 1]");
    if (std::find(scores.begin(), scores.end(), 0.0) != scores.end()) return 0.0;

    std::sort(scores.begin(), scores.end(), std::greater<>());
    const auto m = static_cast<double>(scores.size());
    double best = 0.0;
    for (std::size_t j = 0; j < scores.size(); ++j)
        best = std::max(best, std::min(scores[j], static_cast<double>(j + 1) / m));
    return best;
}

double aggregate_faithfulness(const std::vector<ComponentVerdict>& verdicts, double minor_weight) {
    std::vector<double> scores;
    scores.reserve(verdicts.size());
    for (const auto& v : verdicts) scores.push_back(rating_score(v.rating, minor_weight));
    return sugeno_integral(std::move(scores));
}

std::vector<ComponentVerdict> parse_judge_response(std::string_view text) {
    const Json json = extract_json_object(text);
    if (!json.contains("components") || !json.at("components").is_array())
        throw ParseError("judge output: field 'components' must be an array");
    for (const auto& item : json.items())
        if (item.key() != "components") throw ParseError("judge output: unknown field '" + item.key() + "'");

    std::vector<ComponentVerdict> out;
    for (const auto& c : json.at("components")) {
        if (!c.is_object()) throw ParseError("judge output: each component must be an object");
        for (const char* key : {"nl", "lean", "rating"})
            if (!c.contains(key) || !c.at(key).is_string())
                throw ParseError(std::string("judge output: component field '") + key + "' must be a string");
        for (const auto& item : c.items())
            if (item.key() != "nl" && item.key() != "lean" && item.key() != "rating")
                throw ParseError("judge output: unknown component field '" + item.key() + "'");
        const auto rating_text = c.at("rating").get<std::string>();
        auto rating = rating_from_string(rating_text);
        if (!rating)
            throw ParseError("judge output: rating \"" + rating_text +
                             "\" is not perfect_match, minor_inconsistency or major_inconsistency");
        out.push_back({c.at("nl").get<std::string>(), c.at("lean").get<std::string>(), *rating});
    }
    if (out.empty()) throw ParseError("judge output: no components");
    return out;
}

JudgeResult judge_components(const std::string& nl_statement, const std::string& formal_statement,
                             Provider& provider, const PromptLibrary& prompts, const RetryPolicy& policy) {
    ChatRequest request;
    request.system_prompt = prompts.get("judge.system");
    request.messages.push_back(
        {Role::User,
         prompts.render("judge.user", {{"nl_statement", nl_statement}, {"formal_statement", formal_statement}})});

    JudgeResult result;
    auto check = [&](const std::string& response) {
        try {
            result.verdicts = parse_judge_response(response);
            return CheckResult::pass();
        } catch (const ParseError& e) {
            result.verdicts.clear();
            return CheckResult::fail(e.what());
        }
    };
    RetryOutcome outcome = retry_with_feedback(provider, request, policy, check);
    result.attempts = std::move(outcome.attempts);
    result.failed = !outcome.passed;
    result.error = outcome.last_error;
    return result;
}

FaithfulnessRecord score_faithfulness(const std::string& node_id, const std::string& nl_statement,
                                      const std::string& formal_statement, bool syntax_ok, Provider& provider,
                                      const PromptLibrary& prompts, const RetryPolicy& policy, double minor_weight) {
    FaithfulnessRecord record;
    record.node_id = node_id;
    if (!syntax_ok) return record;
    JudgeResult judged = judge_components(nl_statement, formal_statement, provider, prompts, policy);
    record.judged = true;
    record.attempts = std::move(judged.attempts);
    if (judged.failed) {
        record.judge_failure = true;
        return record;
    }
    record.verdicts = std::move(judged.verdicts);
    record.f = aggregate_faithfulness(record.verdicts, minor_weight);
    return record;
}

Json faithfulness_to_json(const FaithfulnessRecord& record) {
    Json verdicts = Json::array();
    for (const auto& v : record.verdicts)
        verdicts.push_back({{"nl", v.component_text}, {"lean", v.formal_text}, {"rating", to_string(v.rating)}});
    Json attempts = Json::array();
    for (const auto& a : record.attempts) attempts.push_back(exchange_to_json(a));
    return {{"node_id", record.node_id},
            {"f", record.f},
            {"judged", record.judged},
            {"judge_failure", record.judge_failure},
            {"verdicts", std::move(verdicts)},
            {"attempts", std::move(attempts)}};
}

FaithfulnessRecord faithfulness_from_json(const Json& json) {
    try {
        FaithfulnessRecord record;
        record.node_id = json.at("node_id").get<std::string>();
        record.f = json.at("f").get<double>();
        record.judged = json.at("judged").get<bool>();
        record.judge_failure = json.at("judge_failure").get<bool>();
        for (const auto& v : json.at("verdicts")) {
            auto rating = rating_from_string(v.at("rating").get<std::string>());
            if (!rating) throw ParseError("faithfulness record '" + record.node_id + "': invalid rating");
            record.verdicts.push_back({v.at("nl").get<std::string>(), v.at("lean").get<std::string>(), *rating});
        }
        for (const auto& a : json.at("attempts")) record.attempts.push_back(exchange_from_json(a));
        return record;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("faithfulness record: ") + e.what());
    }
}

double proof_score(const std::map<std::string, double>& f, const std::map<std::string, bool>& c,
                   const std::map<std::string, bool>& structural) {
    if (f.empty()) throw ContractViolation("proof_score needs at least one node");
    auto same_keys = [&](const auto& other) {
        return other.size() == f.size() &&
               std::equal(f.begin(), f.end(), other.begin(), [](const auto& a, const auto& b) { return a.first == b.first; });
    };
    if (!same_keys(c) || !same_keys(structural))
        throw ContractViolation("proof_score: f, c and structural must cover the same nodes");
    double sum = 0.0;
    for (const auto& [id, fi] : f)
        if (c.at(id) && structural.at(id)) sum += fi;
    return sum / static_cast<double>(f.size());
}

StructureVerdict judge_structure(const std::string& node_id, const std::string& nl_statement,
                                 const std::string& nl_dependencies, const std::string& proof_source,
                                 Provider& provider, const PromptLibrary& prompts, const RetryPolicy& policy) {
    ChatRequest request;
    request.system_prompt = prompts.get("structure_judge.system");
    request.messages.push_back({Role::User, prompts.render("structure_judge.user",
                                                          {{"node_id", node_id},
                                                           {"statement", nl_statement},
                                                           {"nl_dependencies", nl_dependencies},
                                                           {"proof_source", proof_source}})});
    StructureVerdict verdict;
    auto check = [&](const std::string& response) {
        try {
            const Json json = extract_json_object(response);
            if (!json.contains("faithful") || !json.at("faithful").is_boolean())
                throw ParseError("structure judge output: field 'faithful' must be a boolean");
            if (!json.contains("used") || !json.at("used").is_array())
                throw ParseError("structure judge output: field 'used' must be an array");
            verdict.faithful = json.at("faithful").get<bool>();
            verdict.used.clear();
            for (const auto& id : json.at("used")) {
                if (!id.is_string()) throw ParseError("structure judge output: 'used' must contain node ids");
                verdict.used.push_back(id.get<std::string>());
            }
            return CheckResult::pass();
        } catch (const ParseError& e) {
            return CheckResult::fail(e.what());
        }
    };
    RetryOutcome outcome = retry_with_feedback(provider, request, policy, check);
    verdict.attempts = std::move(outcome.attempts);
    verdict.failed = !outcome.passed;
    if (verdict.failed) verdict.faithful = false;
    return verdict;
}

Json structure_verdict_to_json(const StructureVerdict& verdict) {
    Json attempts = Json::array();
    for (const auto& a : verdict.attempts) attempts.push_back(exchange_to_json(a));
    return {{"faithful", verdict.faithful},
            {"used", verdict.used},
            {"failed", verdict.failed},
            {"attempts", std::move(attempts)}};
}

StructureVerdict structure_verdict_from_json(const Json& json) {
    try {
        StructureVerdict verdict;
        verdict.faithful = json.at("faithful").get<bool>();
        verdict.used = json.at("used").get<std::vector<std::string>>();
        verdict.failed = json.at("failed").get<bool>();
        for (const auto& a : json.at("attempts")) verdict.attempts.push_back(exchange_from_json(a));
        return verdict;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("structure verdict: ") + e.what());
    }
}

Json score_report_to_json(const ScoreReport& report) {
    Json nodes = Json::array();
    for (const auto& n : report.nodes)
        nodes.push_back(
            {{"id", n.id}, {"f", n.f}, {"c", n.c}, {"structural", n.structural}, {"error_source", n.error_source}});
    return {{"problem", report.problem},
            {"mode", report.mode},
            {"n", report.n},
            {"proofscore", report.proofscore},
            {"nodes", std::move(nodes)}};
}

ScoreReport score_report_from_json(const Json& json) {
    try {
        ScoreReport report;
        report.problem = json.at("problem").get<std::string>();
        report.mode = json.at("mode").get<std::string>();
        report.n = json.at("n").get<int>();
        report.proofscore = json.at("proofscore").get<double>();
        for (const auto& n : json.at("nodes"))
            report.nodes.push_back({n.at("id").get<std::string>(), n.at("f").get<double>(), n.at("c").get<bool>(),
                                    n.at("structural").get<bool>(), n.at("error_source").get<std::string>()});
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("score report: ") + e.what());
    }
}

}  // namespace proofflow
