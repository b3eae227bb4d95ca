#include "proofflow/lean_text.hpp"

#include <algorithm>
#include <cctype>

namespace proofflow::lean {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Decodes the UTF-8 code point at `i`; sets `len` to its byte length.
char32_t decode(std::string_view s, std::size_t i, std::size_t& len) {
    const auto b = static_cast<unsigned char>(s[i]);
    if (b < 0x80) {
        len = 1;
        return b;
    }
    std::size_t n = b >= 0xF0 ? 4 : b >= 0xE0 ? 3 : b >= 0xC0 ? 2 : 1;
    if (i + n > s.size()) n = 1;
    char32_t cp = n == 4 ? b & 0x07 : n == 3 ? b & 0x0F : n == 2 ? b & 0x1F : b;
    for (std::size_t k = 1; k < n; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    len = n;
    return cp;
}

bool is_ident_codepoint(char32_t cp) {
    if (cp < 0x80) return std::isalnum(static_cast<int>(cp)) || cp == '_' || cp == '\'' || cp == '!' || cp == '?';
    return (cp >= 0x00C0 && cp <= 0x024F) || (cp >= 0x0370 && cp <= 0x03FF && cp != 0x03BB) ||
           (cp >= 0x1D00 && cp <= 0x1DBF) || (cp >= 0x2080 && cp <= 0x209C) || (cp >= 0x2100 && cp <= 0x214F);
}

// Code point ending right before byte offset `i`.
char32_t previous_codepoint(std::string_view s, std::size_t i) {
    if (i == 0) return 0;
    std::size_t start = i - 1;
    while (start > 0 && (static_cast<unsigned char>(s[start]) & 0xC0) == 0x80) --start;
    std::size_t len = 0;
    return decode(s, start, len);
}

// +1 for an opening bracket, -1 for a closing one, 0 otherwise.
int bracket_delta(std::string_view s, std::size_t i, std::size_t& len) {
    char32_t cp = decode(s, i, len);
    switch (cp) {
    case '(': case '[': case '{': case U'⟨': case U'⦃': return 1;
    case ')': case ']': case '}': case U'⟩': case U'⦄': return -1;
    default: return 0;
    }
}

std::string strip_outer_parens(std::string text) {
    for (;;) {
        text = trim(text);
        if (text.size() < 2 || text.front() != '(' || text.back() != ')') return text;
        // Only strip when the first '(' closes at the very end.
        int depth = 0;
        bool encloses = true;
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] == '(') ++depth;
            if (text[i] == ')') --depth;
            if (depth == 0 && i + 1 < text.size()) {
                encloses = false;
                break;
            }
        }
        if (!encloses) return text;
        text = text.substr(1, text.size() - 2);
    }
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }
bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string trim(std::string_view text) {
    std::size_t b = 0, e = text.size();
    while (b < e && is_space(text[b])) ++b;
    while (e > b && is_space(text[e - 1])) --e;
    return std::string(text.substr(b, e - b));
}

std::string normalize_whitespace(std::string_view text) {
    std::string out;
    bool pending_space = false;
    for (char c : text) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        out += c;
    }
    return out;
}

namespace {

// Drops surrounding blank lines and trailing spaces but keeps the first
// line's indentation, which matters for tactic blocks appended to a script.
std::string trim_lines(std::string_view text) {
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\n') start = i + 1;
        else if (!std::isspace(static_cast<unsigned char>(text[i]))) break;
    }
    std::size_t end = text.size();
    while (end > start && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return std::string(text.substr(start, end - start));
}

}  // namespace

std::string strip_code_fences(std::string_view text) {
    const auto open = text.find("```");
    if (open == std::string_view::npos) return trim_lines(text);
    const auto line_end = text.find('\n', open);
    if (line_end == std::string_view::npos) return trim(text);
    const auto close = text.find("```", line_end + 1);
    const auto body = text.substr(line_end + 1, close == std::string_view::npos ? std::string_view::npos
                                                                               : close - line_end - 1);
    return trim_lines(body);
}

std::string mask_comments_and_strings(std::string_view source) {
    std::string out(source);
    std::size_t i = 0;
    auto blank = [&](std::size_t from, std::size_t to) {
        for (std::size_t k = from; k < to && k < out.size(); ++k)
            if (out[k] != '\n') out[k] = ' ';
    };
    while (i < source.size()) {
        if (source.compare(i, 2, "--") == 0) {
            std::size_t end = source.find('\n', i);
            if (end == std::string_view::npos) end = source.size();
            blank(i, end);
            i = end;
        } else if (source.compare(i, 2, "/-") == 0) {
            int depth = 0;
            std::size_t j = i;
            while (j < source.size()) {
                if (source.compare(j, 2, "/-") == 0) {
                    ++depth;
                    j += 2;
                } else if (source.compare(j, 2, "-/") == 0) {
                    j += 2;
                    if (--depth == 0) break;
                } else {
                    ++j;
                }
            }
            blank(i, j);
            i = j;
        } else if (source[i] == '"') {
            std::size_t j = i + 1;
            while (j < source.size() && source[j] != '"') j += source[j] == '\\' ? 2 : 1;
            blank(i + 1, j);
            i = j + 1;
        } else {
            ++i;
        }
    }
    return out;
}

std::vector<std::size_t> find_token(std::string_view source, std::string_view word) {
    std::vector<std::size_t> hits;
    if (word.empty()) return hits;
    const std::string masked = mask_comments_and_strings(source);
    std::size_t pos = 0;
    while ((pos = masked.find(word, pos)) != std::string::npos) {
        const char32_t before = previous_codepoint(masked, pos);
        bool left_ok = pos == 0 || (!is_ident_codepoint(before) && before != '.');
        bool right_ok = true;
        if (pos + word.size() < masked.size()) {
            std::size_t len = 0;
            right_ok = !is_ident_codepoint(decode(masked, pos + word.size(), len));
        }
        if (left_ok && right_ok) hits.push_back(pos);
        pos += word.size();
    }
    return hits;
}

std::pair<int, int> line_col(std::string_view source, std::size_t offset) {
    int line = 1, col = 0;
    for (std::size_t i = 0; i < offset && i < source.size(); ++i) {
        if (source[i] == '\n') {
            ++line;
            col = 0;
        } else if ((static_cast<unsigned char>(source[i]) & 0xC0) != 0x80) {
            ++col;
        }
    }
    return {line, col};
}

std::optional<Declaration> parse_declaration(std::string_view source) {
    const std::string masked = mask_comments_and_strings(source);

    std::size_t start = std::string::npos;
    std::string keyword;
    for (const char* kw : {"theorem", "lemma", "example"}) {
        for (std::size_t hit : find_token(masked, kw)) {
            // Must start a line, possibly after modifiers such as "private".
            std::size_t line_start = masked.rfind('\n', hit);
            line_start = line_start == std::string::npos ? 0 : line_start + 1;
            std::string_view prefix(masked.data() + line_start, hit - line_start);
            std::string lead = normalize_whitespace(prefix);
            if (!lead.empty() && lead != "private" && lead != "protected" && !ends_with(lead, "]")) continue;
            if (hit < start) {
                start = hit;
                keyword = kw;
            }
            break;
        }
    }
    if (start == std::string::npos) return std::nullopt;

    Declaration decl;
    decl.keyword = keyword;
    std::size_t i = start + keyword.size();
    auto skip_ws = [&] {
        while (i < masked.size() && is_space(masked[i])) ++i;
    };
    skip_ws();
    if (keyword != "example") {
        std::size_t name_start = i;
        while (i < masked.size() && !is_space(masked[i]) && masked[i] != ':' && masked[i] != '(' &&
               masked[i] != '{' && masked[i] != '[')
            ++i;
        decl.name = std::string(source.substr(name_start, i - name_start));
        if (decl.name.empty()) return std::nullopt;
    }

    for (;;) {
        skip_ws();
        if (i >= masked.size()) return std::nullopt;
        std::size_t len = 0;
        if (bracket_delta(masked, i, len) == 1) {
            std::size_t group_start = i;
            int depth = 0;
            do {
                int d = bracket_delta(masked, i, len);
                depth += d;
                i += len;
            } while (i < masked.size() && depth > 0);
            if (depth != 0) return std::nullopt;
            decl.binders.push_back(normalize_whitespace(source.substr(group_start, i - group_start)));
            continue;
        }
        if (masked[i] == ':' && masked.compare(i, 2, ":=") != 0) {
            ++i;
            break;
        }
        return std::nullopt;
    }

    const std::size_t conclusion_start = i;
    int depth = 0;
    decl.assign_offset = std::string::npos;
    while (i < masked.size()) {
        std::size_t len = 0;
        depth += bracket_delta(masked, i, len);
        if (depth == 0 && masked.compare(i, 2, ":=") == 0) {
            decl.assign_offset = i;
            break;
        }
        i += len;
    }
    const std::size_t conclusion_end = decl.assign_offset == std::string::npos ? masked.size() : decl.assign_offset;
    decl.conclusion = normalize_whitespace(source.substr(conclusion_start, conclusion_end - conclusion_start));
    if (decl.assign_offset != std::string::npos) decl.body = trim(source.substr(decl.assign_offset + 2));
    return decl;
}

std::string hypothesis_name(std::string_view node_id) { return "h_" + std::string(node_id); }

std::set<std::string> referenced_premises(std::string_view text, const std::set<std::string>& candidates) {
    std::set<std::string> out;
    for (const auto& id : candidates)
        if (!find_token(text, hypothesis_name(id)).empty()) out.insert(id);
    return out;
}

bool is_structural_negation(std::string_view original, std::string_view negated) {
    const std::string base = strip_outer_parens(normalize_whitespace(original));
    const std::string neg = strip_outer_parens(normalize_whitespace(negated));
    if (starts_with(neg, "¬")) return strip_outer_parens(neg.substr(std::string_view("¬").size())) == base;
    if (starts_with(neg, "Not ") || starts_with(neg, "Not("))
        return strip_outer_parens(neg.substr(3)) == base;
    for (std::string_view arrow : {"→ False", "-> False"})
        if (ends_with(neg, arrow)) return strip_outer_parens(neg.substr(0, neg.size() - arrow.size())) == base;
    return false;
}

}  // namespace proofflow::lean
