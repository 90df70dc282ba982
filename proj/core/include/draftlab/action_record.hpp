#pragma once

/**
 * @file action_record.hpp
 * @brief A tool call as it appears in trajectories and logs.
 */

#include <string>

#include <nlohmann/json.hpp>

namespace draftlab {

struct ActionRecord {
  std::string name;               ///< e.g. "ClassicRetrieve", "GenerateAnswer"
  nlohmann::json parameters;      ///< keyword arguments of the call

  /// Identity key: two actions belong to the same repetition group iff their
  /// names and canonicalized parameters are identical.
  std::string identity_key() const { return name + "\x1f" + parameters.dump(); }
};

}  // namespace draftlab
