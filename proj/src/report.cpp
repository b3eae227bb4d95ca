#include "proofflow/report.hpp"

#include "proofflow/artifacts.hpp"
#include "proofflow/error.hpp"

namespace proofflow {

namespace embedded {
const std::map<std::string, std::string>& asset_files();
}

namespace {

constexpr std::string_view kPayloadTag = R"(<script type="application/json" id="proofflow-payload">)";

const NodeScore* find_score(const ScoreReport& score, const std::string& id) {
    for (const auto& n : score.nodes)
        if (n.id == id) return &n;
    return nullptr;
}

void replace_all(std::string& text, std::string_view from, std::string_view to) {
    for (std::size_t pos = 0; (pos = text.find(from, pos)) != std::string::npos; pos += to.size())
        text.replace(pos, from.size(), to);
}

}  // namespace

std::string node_status(const PipelineRecord& record, const std::string& node_id) {
    auto f = record.formal.find(node_id);
    if (f == record.formal.end() || !f->second.c_formalizer) return "formalize_error";
    auto c = record.completed.find(node_id);
    if (c == record.completed.end() || c->second.c_tactic) return "proved";
    return "formalized_no_tactics";
}

Json report_payload(const PipelineRecord& record, const ScoreReport& score, const std::string& problem_id) {
    Json per_node = Json::object();
    for (const auto& node : record.build.graph.nodes) {
        const std::string status = node_status(record, node.id);
        auto f = record.formal.find(node.id);
        auto c = record.completed.find(node.id);
        const NodeScore* s = find_score(score, node.id);
        double faith = 0.0;
        if (auto r = record.faithfulness.find(node.id); r != record.faithfulness.end()) faith = r->second.f;

        std::vector<Diagnostic> diagnostics;
        if (status == "formalize_error" && f != record.formal.end()) diagnostics = f->second.diagnostics;
        if (status == "formalized_no_tactics") diagnostics = c->second.diagnostics;

        Json proof = nullptr;
        if (c != record.completed.end() && c->second.c_tactic) proof = c->second.proof_source;
        per_node[node.id] = {
            {"kind", to_tag(node.kind)},
            {"status", status},
            {"f", faith},
            {"error_source", s ? s->error_source : std::string("NotApplicable")},
            {"nl_self_contained", node.nl_self_contained},
            {"statement_source", f != record.formal.end() ? f->second.statement_source : std::string()},
            {"proof_source", std::move(proof)},
            {"diagnostics", diagnostics_to_json(diagnostics)},
        };
    }
    return {{"problem", problem_id},
            {"graph", graph_to_json(record.build.graph)},
            {"per_node", std::move(per_node)},
            {"metrics", {{"mode", score.mode}, {"n", score.n}, {"proofscore", score.proofscore}}}};
}

std::string render_report_html(const Json& payload, const std::string& html_template) {
    const auto open = html_template.find(kPayloadTag);
    if (open == std::string::npos) throw ConfigError("report template has no proofflow-payload script tag");
    const auto insert_at = open + kPayloadTag.size();
    const auto close = html_template.find("</script>", insert_at);
    if (close == std::string::npos) throw ConfigError("report template payload tag is not closed");

    std::string json = payload.dump();
    replace_all(json, "</", "<\\/");
    replace_all(json, "<!--", "<\\u0021--");
    return html_template.substr(0, insert_at) + json + html_template.substr(close);
}

std::string render_report_html(const Json& payload) {
    return render_report_html(payload, embedded::asset_files().at("report_template.html"));
}

Json extract_payload(const std::string& html) {
    const auto open = html.find(kPayloadTag);
    if (open == std::string::npos) throw ParseError("page has no proofflow-payload script tag");
    const auto start = open + kPayloadTag.size();
    const auto close = html.find("</script>", start);
    if (close == std::string::npos) throw ParseError("unterminated payload script tag");
    try {
        return Json::parse(html.substr(start, close - start));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("report payload: ") + e.what());
    }
}

void write_report(const std::filesystem::path& problem_dir) {
    const PipelineRecord record = artifacts::read_pipeline(problem_dir);
    const auto score = artifacts::read_score(problem_dir);
    if (!score) throw ParseError("missing artifact score.json in " + problem_dir.filename().string());
    const std::string id = artifacts::read_problem(problem_dir).id;
    write_text_file(problem_dir / artifacts::kReportFile, render_report_html(report_payload(record, *score, id)));
}

}  // namespace proofflow
