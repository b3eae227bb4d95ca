#include "proofflow/prompts.hpp"

#include "proofflow/error.hpp"
#include "proofflow/json.hpp"

namespace proofflow {

namespace embedded {
const std::map<std::string, std::string>& prompt_files();
}

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            const auto close = tmpl.find('}', i + 1);
            if (close != std::string_view::npos) {
                auto it = vars.find(std::string(tmpl.substr(i + 1, close - i - 1)));
                if (it != vars.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += tmpl[i++];
    }
    return out;
}

namespace {

std::string strip_trailing_newline(std::string text) {
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    return text;
}

std::string name_of(const std::filesystem::path& file) { return file.stem().string(); }

}  // namespace

PromptLibrary PromptLibrary::builtin() {
    PromptLibrary lib;
    for (const auto& [file, text] : embedded::prompt_files())
        lib.templates_[name_of(file)] = strip_trailing_newline(text);
    return lib;
}

PromptLibrary PromptLibrary::with_overrides(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("prompt directory not found: " + dir.string());
    PromptLibrary lib = builtin();
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".txt") continue;
        lib.templates_[name_of(entry.path())] = strip_trailing_newline(read_text_file(entry.path()));
    }
    return lib;
}

const std::string& PromptLibrary::get(std::string_view name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw ConfigError("unknown prompt template '" + std::string(name) + "'");
    return it->second;
}

std::string PromptLibrary::render(std::string_view name, const std::map<std::string, std::string>& vars) const {
    return render_template(get(name), vars);
}

std::string PromptLibrary::version() const {
    const std::string& text = get("version");
    return text.substr(0, text.find('\n'));
}

}  // namespace proofflow
