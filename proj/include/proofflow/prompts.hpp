#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace proofflow {

/// Replaces each `{name}` whose name is a key of `vars`. Other braces are
/// left alone, so templates can show JSON literally.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars);

/// Named prompt templates ("graph_builder.system", "tactic.user", ...).
/// The built-in set is compiled in; a directory can override any file.
class PromptLibrary {
public:
    static PromptLibrary builtin();
    /// Built-in templates overlaid with every *.txt file found in `dir`.
    static PromptLibrary with_overrides(const std::filesystem::path& dir);

    /// Throws ConfigError for an unknown name.
    const std::string& get(std::string_view name) const;
    std::string render(std::string_view name, const std::map<std::string, std::string>& vars) const;
    /// First line of version.txt.
    std::string version() const;

private:
    std::map<std::string, std::string, std::less<>> templates_;
};

}  // namespace proofflow
