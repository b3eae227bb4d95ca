#pragma once

#include "proofflow/bench_harness.hpp"
#include "proofflow/providers.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace proofflow {

enum ExitCode { kExitOk = 0, kExitOther = 1, kExitConfig = 2, kExitBackend = 3 };

/// Stage providers read from a providers file: {"default": cfg, "graph_builder":
/// cfg, "formalizer": cfg, "tactic": cfg, "judge": cfg}. Stages without an
/// entry use "default". Relative paths resolve against the file's directory.
struct ProviderSet {
    std::shared_ptr<Provider> graph_builder;
    std::shared_ptr<Provider> formalizer;
    std::shared_ptr<Provider> tactic;
    std::shared_ptr<Provider> judge;
    /// {stage: {"id", "kind", "model", "thinking"}} for the run manifest.
    Json summary = Json::object();
    bool thinking = false;
};

/// Throws ConfigError. `record_dir` wraps every provider in a RecordingProvider.
ProviderSet load_providers(const std::filesystem::path& file, std::shared_ptr<TraceSink> trace = nullptr,
                           const std::filesystem::path& record_dir = {});

/// Stands in when no checker is configured: every check fails with TransportError.
class UnavailableVerifier final : public Verifier {
public:
    VerifierReport check(const CodeUnit& unit) override;
};

/// Entry point behind the `proofflow` binary. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace proofflow
