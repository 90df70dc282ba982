#pragma once

/**
 * @file answer_value.hpp
 * @brief Tagged answer values exchanged between trajectories and evaluators.
 *
 * An answer is a boolean, integer, real, text, ordered list, or string-keyed
 * mapping, nested to finite depth — exactly the JSON value model minus null,
 * so the representation is nlohmann::json with a shape check at the
 * boundaries. Object keys are unique by construction.
 */

#include <string>

#include <nlohmann/json.hpp>

namespace draftlab {

using AnswerValue = nlohmann::json;

namespace answer {

/// True when the value uses only the supported shapes (no null anywhere).
bool is_valid(const AnswerValue& v);

/// Short shape name for error messages: "bool", "int", "real", "text",
/// "list", "mapping".
std::string shape_name(const AnswerValue& v);

/// Canonical serialization (sorted keys, no whitespace); the basis for
/// action-identity grouping and deterministic judge stubs.
std::string canonical(const AnswerValue& v);

}  // namespace answer
}  // namespace draftlab
