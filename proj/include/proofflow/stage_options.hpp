#pragma once

#include "proofflow/lean_verifier.hpp"
#include "proofflow/llm_gateway.hpp"
#include "proofflow/prompts.hpp"

#include <string>

namespace proofflow {

/// Settings shared by every stage that talks to a model and the checker.
struct StageOptions {
    PromptLibrary prompts = PromptLibrary::builtin();
    RetryPolicy policy;
    /// Preamble prepended to every checked unit.
    std::string header = kDefaultPreamble;
};

}  // namespace proofflow
