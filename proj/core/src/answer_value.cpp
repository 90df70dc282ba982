#include "draftlab/answer_value.hpp"

namespace draftlab::answer {

bool is_valid(const AnswerValue& v) {
  switch (v.type()) {
    case nlohmann::json::value_t::boolean:
    case nlohmann::json::value_t::number_integer:
    case nlohmann::json::value_t::number_unsigned:
    case nlohmann::json::value_t::number_float:
    case nlohmann::json::value_t::string:
      return true;
    case nlohmann::json::value_t::array:
    case nlohmann::json::value_t::object:
      for (const auto& child : v) {
        if (!is_valid(child)) return false;
      }
      return true;
    default:
      return false;
  }
}

std::string shape_name(const AnswerValue& v) {
  if (v.is_boolean()) return "bool";
  if (v.is_number_integer()) return "int";
  if (v.is_number_float()) return "real";
  if (v.is_string()) return "text";
  if (v.is_array()) return "list";
  if (v.is_object()) return "mapping";
  return std::string(v.type_name());
}

std::string canonical(const AnswerValue& v) {
  // nlohmann objects iterate in sorted key order, so dump() is canonical.
  return v.dump();
}

}  // namespace draftlab::answer
