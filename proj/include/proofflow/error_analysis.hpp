#pragma once

#include "proofflow/json.hpp"
#include "proofflow/proof_graph.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace proofflow {

enum class ErrorSource { None, Formalizer, Tactic, NLStatement, NotApplicable };

std::string_view to_string(ErrorSource source);
std::optional<ErrorSource> error_source_from_string(std::string_view text);

inline constexpr double kFaithfulnessThreshold = 0.6;

/// Faithfulness gate (f < threshold or a failed formalizer check), then the
/// provable-kind gate, then tactics, then negation.
ErrorSource classify_node(NodeKind kind, double f, bool c_formalizer, bool tactic_ok, bool negation_proved,
                          double threshold = kFaithfulnessThreshold);

/// Step outcome breakdown; NotApplicable nodes are not counted.
struct ErrorTable {
    std::string label;
    int total_steps = 0;
    /// None, Formalizer, Tactic, NLStatement
    std::array<int, 4> counts{};

    /// Percentage of total_steps for one of the four counted sources.
    double percent(ErrorSource source) const;
};

ErrorTable tabulate_errors(const std::vector<ErrorSource>& sources, std::string label = {});

/// Header "run,total_steps,none_pct,formalizer_pct,tactic_pct,nl_statement_pct";
/// percentages with one decimal.
std::string error_tables_csv(const std::vector<ErrorTable>& tables);
/// Mirrors the CSV: one object per row with numbers parsed back from the CSV cells.
Json error_tables_json(const std::vector<ErrorTable>& tables);

}  // namespace proofflow
