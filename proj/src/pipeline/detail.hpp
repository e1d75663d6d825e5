#pragma once

#include "streamforge/pipeline.hpp"

namespace streamforge::pipeline::detail {

// Problems detectable without solving: parse errors, unsafe variables, an
// encoding that no longer composes. Returns the diagnostic, if any.
std::optional<std::string> static_check(const asp::Snippet& snippet, std::string_view encoding);

json outcome_to_json(const solver::SolveOutcome& outcome);
solver::SolveOutcome outcome_from_json(const json& j);

}  // namespace streamforge::pipeline::detail
