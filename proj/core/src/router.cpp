#include "draftlab/router.hpp"

#include <algorithm>
#include <cctype>

#include "draftlab/errors.hpp"
#include "draftlab/evaluators.hpp"

namespace draftlab::router {

namespace {

bool contains_word(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

EvalSpec leaf(EvalKind kind) {
  EvalSpec spec;
  spec.kind = kind;
  return spec;
}

}  // namespace

FormatClass classify_format_hint(const std::string& hint) {
  const std::string h = normalize_text(hint);
  if (contains_word(h, "list") || contains_word(h, "array")) return FormatClass::List;
  if (contains_word(h, "dict") || contains_word(h, "mapping") || contains_word(h, "object")) {
    return FormatClass::Mapping;
  }
  if (contains_word(h, "bool")) return FormatClass::Boolean;
  if (contains_word(h, "int")) return FormatClass::Integer;
  if (contains_word(h, "float") || contains_word(h, "real") || contains_word(h, "decimal")) {
    return FormatClass::Real;
  }
  if (contains_word(h, "string") || contains_word(h, "str") || contains_word(h, "word") ||
      contains_word(h, "name") || contains_word(h, "text")) {
    return FormatClass::Text;
  }
  return FormatClass::Unknown;
}

std::string to_string(FormatClass fc) {
  switch (fc) {
    case FormatClass::Text: return "text";
    case FormatClass::Integer: return "int";
    case FormatClass::Real: return "float";
    case FormatClass::Boolean: return "bool";
    case FormatClass::List: return "list";
    case FormatClass::Mapping: return "mapping";
    default: return "unknown";
  }
}

RouteTable RouteTable::builtin() {
  RouteTable table;
  table.version_ = 1;
  table.default_spec_ = leaf(EvalKind::StringExactMatch);

  EvalSpec float_match = leaf(EvalKind::FloatExactMatch);
  float_match.tolerance = 1e-6;

  table.routes_["text"] = leaf(EvalKind::StringExactMatch);
  table.routes_["text@list"] = leaf(EvalKind::ElementListOverlap);
  table.routes_["table"] = leaf(EvalKind::StringExactMatch);
  table.routes_["table@int"] = leaf(EvalKind::IntExactMatch);
  table.routes_["table@float"] = float_match;
  table.routes_["image"] = leaf(EvalKind::StringExactMatch);
  table.routes_["formula"] = leaf(EvalKind::ComplexMathFormulaWithLlm);
  table.routes_["metadata"] = leaf(EvalKind::StringExactMatch);
  table.routes_["metadata@list"] = leaf(EvalKind::ElementListIncluded);
  table.routes_["metadata@int"] = leaf(EvalKind::IntExactMatch);
  table.routes_["retrieval"] = leaf(EvalKind::PaperRelevance);
  return table;
}

RouteTable RouteTable::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("route table must be a JSON object");
  RouteTable table;
  if (!j.contains("version")) throw ConfigError("route table needs a version field");
  table.version_ = j.at("version").get<int>();
  table.default_spec_ = j.contains("default") ? EvalSpec::from_json(j.at("default"))
                                              : leaf(EvalKind::StringExactMatch);
  if (j.contains("routes")) {
    if (!j.at("routes").is_object()) throw ConfigError("routes must be an object");
    for (const auto& [key, value] : j.at("routes").items()) {
      table.routes_[key] = EvalSpec::from_json(value);
    }
  }
  return table;
}

nlohmann::json RouteTable::to_json() const {
  nlohmann::json j;
  j["version"] = version_;
  j["default"] = default_spec_.to_json();
  nlohmann::json routes = nlohmann::json::object();
  for (const auto& [key, spec] : routes_) routes[key] = spec.to_json();
  j["routes"] = routes;
  return j;
}

EvalSpec RouteTable::route(const std::string& question_category,
                           const std::string& answer_format_hint) const {
  const std::string category = normalize_text(question_category);
  const std::string format = to_string(classify_format_hint(answer_format_hint));

  if (const auto it = routes_.find(category + "@" + format); it != routes_.end()) {
    return it->second;
  }
  if (const auto it = routes_.find(category); it != routes_.end()) {
    return it->second;
  }
  return default_spec_;
}

}  // namespace draftlab::router
