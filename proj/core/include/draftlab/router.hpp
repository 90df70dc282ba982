#pragma once

/**
 * @file router.hpp
 * @brief Question-type routing: category + answer-format hint -> EvalSpec.
 *
 * The routing table is data, not code: it ships as a versioned JSON document
 * and is validated on load. A built-in table covers the five benchmark
 * categories; "unknown" and every unmatched pair fall back to normalized
 * string exact match, so routing is total.
 */

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "draftlab/eval_spec.hpp"

namespace draftlab::router {

/// Coarse answer-format classes recognized in free-text hints.
enum class FormatClass { Text, Integer, Real, Boolean, List, Mapping, Unknown };

FormatClass classify_format_hint(const std::string& hint);
std::string to_string(FormatClass fc);

class RouteTable {
public:
  /// The frozen default mapping shipped with the artifact.
  static RouteTable builtin();

  /// Loads and validates a JSON route document. Throws ConfigError.
  static RouteTable from_json(const nlohmann::json& j);

  nlohmann::json to_json() const;

  /**
   * Deterministic total routing. Lookup order: "category@format-class",
   * then "category", then the default spec.
   */
  EvalSpec route(const std::string& question_category,
                 const std::string& answer_format_hint) const;

  int version() const { return version_; }

private:
  int version_ = 1;
  std::map<std::string, EvalSpec> routes_;
  EvalSpec default_spec_;
};

}  // namespace draftlab::router
