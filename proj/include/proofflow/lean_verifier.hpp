#pragma once

#include "proofflow/json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <semaphore>
#include <string>
#include <vector>

namespace proofflow {

inline constexpr const char* kDefaultPreamble = "import Mathlib";
inline constexpr int kDefaultVerifierTimeoutS = 300;

struct CodeUnit {
    /// The exact text sent for checking (preamble included).
    std::string source;
    /// The preamble that was prepended to the body when the unit was built.
    std::string imports_header;
    std::string unit_id;

    bool operator==(const CodeUnit&) const = default;
};

/// source = header + blank line + body (just the body when header is empty).
CodeUnit make_unit(std::string unit_id, const std::string& body, const std::string& header = kDefaultPreamble);

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    int line = 1;  // 1-based
    int col = 0;   // 0-based
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

struct VerifierReport {
    std::string unit_id;
    bool ok = false;
    /// Ordered by (line, col).
    std::vector<Diagnostic> diagnostics;
    bool contains_sorry_warning = false;
    std::int64_t elapsed_ms = 0;

    bool operator==(const VerifierReport&) const = default;
};

/// Sorts diagnostics and derives `ok` and `contains_sorry_warning` from them.
VerifierReport finalize_report(VerifierReport report);

/// "L{line}:{col}: {message}" for the earliest error. Throws ContractViolation on an ok report.
std::string first_error_summary(const VerifierReport& report);

Json diagnostics_to_json(const std::vector<Diagnostic>& diagnostics);
std::vector<Diagnostic> diagnostics_from_json(const Json& json);

/// Wire format: {"unit_id","ok","diagnostics":[{"severity","line","col","message"}],"elapsed_ms"}.
Json report_to_wire(const VerifierReport& report);
VerifierReport report_from_wire(const Json& json);

/// Artifact format: wire format plus "contains_sorry_warning".
Json report_to_json(const VerifierReport& report);
VerifierReport report_from_json(const Json& json);

Json unit_to_json(const CodeUnit& unit);
CodeUnit unit_from_json(const Json& json);

class Verifier {
public:
    virtual ~Verifier() = default;
    /// Throws TimeoutError / TransportError / MalformedPayloadError on
    /// infrastructure failure; compile errors come back in the report.
    virtual VerifierReport check(const CodeUnit& unit) = 0;
};

/// Client for a remote checking service: POST {base_url}/verify.
class HttpVerifier final : public Verifier {
public:
    explicit HttpVerifier(std::string base_url, int timeout_s = kDefaultVerifierTimeoutS, int parallelism = 4);

    VerifierReport check(const CodeUnit& unit) override;

    /// The exact body POSTed for `unit`.
    std::string request_body(const CodeUnit& unit) const;

private:
    std::string origin_;
    std::string path_prefix_;
    int timeout_s_;
    std::counting_semaphore<64> slots_;
};

/// In-process stand-in for the checking service. Looks the exact source up
/// in a replay table first; otherwise runs a lexical check (balanced
/// delimiters, a command present, declarations closed by ":=" and a body,
/// placeholder warnings) plus configurable substring rules that inject
/// diagnostics. Pure: the same source always yields the same report.
class MockVerifier final : public Verifier {
public:
    struct Rule {
        std::string contains;
        Severity severity = Severity::Error;
        std::string message;
    };

    MockVerifier() = default;
    MockVerifier(std::map<std::string, VerifierReport> table, std::vector<Rule> rules)
        : table_(std::move(table)), rules_(std::move(rules)) {}

    /// {"table": [{"source", "report"}], "rules": [{"contains", "severity", "message"}]}
    static MockVerifier from_json(const Json& json);
    static MockVerifier from_file(const std::filesystem::path& path);

    VerifierReport check(const CodeUnit& unit) override;

private:
    std::map<std::string, VerifierReport> table_;
    std::vector<Rule> rules_;
};

}  // namespace proofflow
