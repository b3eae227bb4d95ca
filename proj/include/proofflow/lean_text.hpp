#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

// Lightweight lexical helpers over Lean 4 source. None of this elaborates
// anything; it only finds tokens and top-level structure.
namespace proofflow::lean {

inline constexpr std::string_view kPlaceholder = "sorry";

/// Returns the body of the first ``` fenced block when present, otherwise
/// the text itself; leading and trailing blank lines are dropped.
std::string strip_code_fences(std::string_view text);

std::string trim(std::string_view text);

/// Collapses every whitespace run to one space and trims.
std::string normalize_whitespace(std::string_view text);

/// Byte offsets of `word` occurrences that are whole identifiers outside
/// comments and string literals.
std::vector<std::size_t> find_token(std::string_view source, std::string_view word);

inline bool contains_placeholder(std::string_view source) { return !find_token(source, kPlaceholder).empty(); }

/// Same text with comments and string literal contents blanked by spaces,
/// preserving byte offsets.
std::string mask_comments_and_strings(std::string_view source);

/// 1-based line, 0-based column (in code points) of a byte offset.
std::pair<int, int> line_col(std::string_view source, std::size_t offset);

struct Declaration {
    std::string keyword;  // theorem | lemma | example
    std::string name;     // empty for example
    std::vector<std::string> binders;  // each including its brackets
    std::string conclusion;
    std::string body;  // text after the top-level ":=", trimmed
    /// Byte offset of ":=" in the source it was parsed from.
    std::size_t assign_offset = 0;
};

/// Parses the first top-level theorem/lemma/example declaration.
std::optional<Declaration> parse_declaration(std::string_view source);

/// Hypothesis name used for a premise node: "h_" + id.
std::string hypothesis_name(std::string_view node_id);

/// Ids from `candidates` whose hypothesis name appears as a token in `text`.
std::set<std::string> referenced_premises(std::string_view text, const std::set<std::string>& candidates);

/// True when `negated` is `¬ C`, `¬ (C)`, `Not (C)` or `(C) → False` for the
/// original conclusion C, up to whitespace and redundant outer parentheses.
bool is_structural_negation(std::string_view original, std::string_view negated);

}  // namespace proofflow::lean
