#include "proofflow/json.hpp"

#include "proofflow/error.hpp"

#include <fstream>
#include <sstream>

namespace proofflow {

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

Json extract_json_object(std::string_view text) {
    const auto open = text.find('{');
    if (open == std::string_view::npos) throw ParseError("no JSON object found in response");
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{') ++depth;
        else if (c == '}' && --depth == 0) {
            try {
                return Json::parse(text.substr(open, i - open + 1));
            } catch (const nlohmann::json::parse_error& e) {
                throw ParseError(std::string("invalid JSON: ") + e.what());
            }
        }
    }
    throw ParseError("unterminated JSON object in response");
}

Json read_json_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& value) {
    write_text_file(path, value.dump(2) + "\n");
}

}  // namespace proofflow
