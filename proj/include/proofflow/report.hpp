#pragma once

#include "proofflow/pipeline.hpp"

#include <filesystem>
#include <string>

namespace proofflow {

/// "formalize_error", "formalized_no_tactics" or "proved". Conditions and
/// definitions carry no tactic obligation and count as proved once formalized.
std::string node_status(const PipelineRecord& record, const std::string& node_id);

/// {"problem", "graph", "per_node": {id: {"kind", "status", "f", "error_source",
/// "nl_self_contained", "statement_source", "proof_source", "diagnostics"}}, "metrics"}
Json report_payload(const PipelineRecord& record, const ScoreReport& score, const std::string& problem_id);

/// Splices the payload into the page template's "proofflow-payload" script tag.
std::string render_report_html(const Json& payload, const std::string& html_template);
std::string render_report_html(const Json& payload);

/// The payload embedded in a rendered page.
Json extract_payload(const std::string& html);

/// Rebuilds report.html in a pipeline problem directory from its artifacts.
void write_report(const std::filesystem::path& problem_dir);

}  // namespace proofflow
