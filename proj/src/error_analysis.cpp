#include "proofflow/error_analysis.hpp"

#include "proofflow/error.hpp"

#include <cstdio>

namespace proofflow {

std::string_view to_string(ErrorSource source) {
    switch (source) {
    case ErrorSource::None: return "None";
    case ErrorSource::Formalizer: return "Formalizer";
    case ErrorSource::Tactic: return "Tactic";
    case ErrorSource::NLStatement: return "NLStatement";
    case ErrorSource::NotApplicable: return "NotApplicable";
    }
    return "?";
}

std::optional<ErrorSource> error_source_from_string(std::string_view text) {
    for (ErrorSource s : {ErrorSource::None, ErrorSource::Formalizer, ErrorSource::Tactic, ErrorSource::NLStatement,
                          ErrorSource::NotApplicable})
        if (to_string(s) == text) return s;
    return std::nullopt;
}

ErrorSource classify_node(NodeKind kind, double f, bool c_formalizer, bool tactic_ok, bool negation_proved,
                          double threshold) {
    if (f < threshold || !c_formalizer) return ErrorSource::Formalizer;
    if (!is_provable(kind)) return ErrorSource::NotApplicable;
    if (tactic_ok) return ErrorSource::None;
    if (negation_proved) return ErrorSource::NLStatement;
    return ErrorSource::Tactic;
}

double ErrorTable::percent(ErrorSource source) const {
    if (source == ErrorSource::NotApplicable) throw ContractViolation("NotApplicable is not tabulated");
    if (total_steps == 0) return 0.0;
    return 100.0 * counts[static_cast<std::size_t>(source)] / total_steps;
}

ErrorTable tabulate_errors(const std::vector<ErrorSource>& sources, std::string label) {
    ErrorTable table;
    table.label = std::move(label);
    for (ErrorSource s : sources) {
        if (s == ErrorSource::NotApplicable) continue;
        ++table.counts[static_cast<std::size_t>(s)];
        ++table.total_steps;
    }
    return table;
}

namespace {

std::string one_decimal(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", value);
    return buf;
}

constexpr std::array<ErrorSource, 4> kColumns = {ErrorSource::None, ErrorSource::Formalizer, ErrorSource::Tactic,
                                                 ErrorSource::NLStatement};
constexpr std::array<const char*, 4> kColumnNames = {"none_pct", "formalizer_pct", "tactic_pct",
                                                     "nl_statement_pct"};

}  // namespace

std::string error_tables_csv(const std::vector<ErrorTable>& tables) {
    std::string out = "run,total_steps";
    for (const char* name : kColumnNames) out += std::string(",") + name;
    out += "\n";
    for (const auto& t : tables) {
        out += t.label + "," + std::to_string(t.total_steps);
        for (ErrorSource s : kColumns) out += "," + one_decimal(t.percent(s));
        out += "\n";
    }
    return out;
}

Json error_tables_json(const std::vector<ErrorTable>& tables) {
    Json rows = Json::array();
    for (const auto& t : tables) {
        Json row = {{"run", t.label}, {"total_steps", t.total_steps}};
        for (std::size_t i = 0; i < kColumns.size(); ++i)
            row[kColumnNames[i]] = std::stod(one_decimal(t.percent(kColumns[i])));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace proofflow
