#include "test_support.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace fs = std::filesystem;

namespace proofflow::testing {

fs::path source_dir() { return PROOFFLOW_SOURCE_DIR; }
fs::path dataset_dir() { return source_dir() / "data" / "dataset"; }
fs::path fixtures_dir() { return source_dir() / "fixtures"; }
fs::path golden_dir() { return source_dir() / "tests" / "golden"; }

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
}

TempDir::TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = fs::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::map<std::string, std::string> snapshot_tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        out[fs::relative(entry.path(), root).generic_string()] = read_file(entry.path());
    }
    return out;
}

std::vector<std::string> diff_trees(const fs::path& a, const fs::path& b, const std::vector<std::string>& ignore) {
    auto skip = [&](const std::string& rel) {
        const std::string name = fs::path(rel).filename().string();
        return std::find(ignore.begin(), ignore.end(), name) != ignore.end();
    };
    const auto left = snapshot_tree(a);
    const auto right = snapshot_tree(b);
    std::vector<std::string> out;
    for (const auto& [rel, bytes] : left) {
        if (skip(rel)) continue;
        auto it = right.find(rel);
        if (it == right.end()) out.push_back("only in first: " + rel);
        else if (it->second != bytes) out.push_back("differs: " + rel);
    }
    for (const auto& [rel, bytes] : right)
        if (!skip(rel) && !left.count(rel)) out.push_back("only in second: " + rel);
    return out;
}

std::shared_ptr<MockVerifier> fixture_verifier() {
    return std::make_shared<MockVerifier>(MockVerifier::from_file(fixtures_dir() / "mock_verifier.json"));
}

Backends fixture_backends() {
    ProviderSet set = load_providers(fixtures_dir() / "providers.json");
    Backends b;
    b.graph_builder = set.graph_builder;
    b.formalizer = set.formalizer;
    b.tactic = set.tactic;
    b.judge = set.judge;
    b.verifier = fixture_verifier();
    return b;
}

}  // namespace proofflow::testing
